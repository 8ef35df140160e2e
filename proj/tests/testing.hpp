#pragma once

#include <cmath>

#include <doctest.h>

#include "qproc/errors.hpp"

#define CHECK_NEAR(a, b, tol) CHECK(std::abs(static_cast<double>(a) - static_cast<double>(b)) <= (tol))
#define REQUIRE_NEAR(a, b, tol) REQUIRE(std::abs(static_cast<double>(a) - static_cast<double>(b)) <= (tol))

// Runs f and returns the ErrorKind it throws; fails the test when nothing is thrown.
template <class F>
qproc::ErrorKind thrownKind(F&& f) {
    try {
        f();
    } catch (const qproc::Error& e) {
        return e.kind();
    }
    FAIL("expected a qproc::Error");
    return qproc::ErrorKind::Validation;
}
