package com.shopsys.delivery.web;

import org.springframework.web.bind.annotation.*;
import org.springframework.web.client.RestTemplate;

@RestController
public class DeliveryController {
    /* Dispatch flow:
       scheduled -> picked up -> delivered */
    private RestTemplate restTemplate;

    @PostMapping("/api/v2/deliveries")
    public String schedule(TrackingDto request) {
        String base = "http://USER-SERVICE";
        restTemplate.getForObject(base + "/api/v1/users/" + request.getUserId(), String.class);
        audit("created // delivery");
        return "scheduled";
    }

    @PostMapping("/api/v2/deliveries/audit")
    private String audit(String event) {
        restTemplate.postForObject("http://AUDIT-SERVICE/api/v1/audit", event, String.class);
        return event;
    }
}
