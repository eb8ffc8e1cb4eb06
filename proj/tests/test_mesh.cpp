#include <gtest/gtest.h>
TEST(Placeholder, Ok) { EXPECT_TRUE(true); }
