package com.shopsys.user.service.base;

public abstract class BaseValidator {
    protected boolean notNull(Object value) {
        return value != null;
    }
}
