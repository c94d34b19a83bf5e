#pragma once

#include <gtest/gtest.h>

#include "mim/error.hpp"

// Expects `statement` to throw mim::Error carrying `expected_code`.
#define EXPECT_MIM_ERROR(statement, expected_code)                                        \
  do {                                                                                     \
    try {                                                                                  \
      statement;                                                                           \
      ADD_FAILURE() << "expected " << mim::to_string(expected_code) << ", nothing thrown"; \
    } catch (const mim::Error& e) {                                                        \
      EXPECT_EQ(e.code(), expected_code) << e.what();                                      \
    }                                                                                      \
  } while (0)
