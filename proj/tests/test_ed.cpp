#include <doctest.h>
#include "quench/model.hpp"
TEST_CASE("placeholder_ed") { CHECK(true); }
