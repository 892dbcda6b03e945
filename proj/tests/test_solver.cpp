#include <catch2/catch_amalgamated.hpp>
#include <irlw/experiment.hpp>
TEST_CASE("smoke") { REQUIRE(true); }
