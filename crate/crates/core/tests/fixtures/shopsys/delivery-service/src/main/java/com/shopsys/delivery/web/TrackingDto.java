package com.shopsys.delivery.web;

public class TrackingDto {
    private Long userId;

    public Long getUserId() {
        return userId;
    }
}
