#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "regcheck/error.hpp"

namespace testing_support {

inline std::string data_path(const std::string& rel) {
  return std::string(REGCHECK_TEST_DATA) + "/" + rel;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testing_support

// Asserts that `stmt` throws regcheck::Error with the given code.
#define EXPECT_ERROR_CODE(stmt, expected)                                   \
  do {                                                                      \
    try {                                                                   \
      stmt;                                                                 \
      ADD_FAILURE() << "no exception from " #stmt;                          \
    } catch (const regcheck::Error& e_) {                                   \
      EXPECT_EQ(e_.code(), expected) << e_.what();                          \
    }                                                                       \
  } while (0)
