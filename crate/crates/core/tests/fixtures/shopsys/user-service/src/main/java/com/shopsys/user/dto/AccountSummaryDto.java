package com.shopsys.user.dto;

public class AccountSummaryDto {
    private Long userId;
    private int orderCount;
}
