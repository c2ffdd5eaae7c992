package com.shopsys.order.model;

public class BaseModel {
    private String createdAt;
    private String updatedAt;
}
