#include <doctest.h>
#include "quench/model.hpp"
TEST_CASE("placeholder_mps") { CHECK(true); }
