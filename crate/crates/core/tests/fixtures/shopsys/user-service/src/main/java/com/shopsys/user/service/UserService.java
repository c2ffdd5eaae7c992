package com.shopsys.user.service;

public interface UserService {
    UserDto find(Long id);
    UserDto create(UserDto body);
}
