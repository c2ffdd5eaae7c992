package com.shopsys.user;

public class UserServiceImplTest {
    public void runsWithoutCrashing() {
        Object impl = new Object();
    }
}
