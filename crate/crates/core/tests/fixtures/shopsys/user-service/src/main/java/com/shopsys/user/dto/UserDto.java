package com.shopsys.user.dto;

public class UserDto {
    private Long id;
    private String name;
}
