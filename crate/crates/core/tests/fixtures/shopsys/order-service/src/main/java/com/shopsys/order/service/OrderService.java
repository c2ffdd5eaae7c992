package com.shopsys.order.service;

public interface OrderService {
    String place(Long userId);
}
