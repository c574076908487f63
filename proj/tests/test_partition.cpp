#include "doctest.h"

#include "qsearch/errors.hpp"
#include "qsearch/partition.hpp"

using qsearch::ConfigError;
using qsearch::RegisterPartition;

TEST_SUITE("partition") {

TEST_CASE("layout: register 1 is innermost, sizes listed outermost first") {
    const RegisterPartition p({6, 6, 6});
    CHECK(p.stage_count() == 3);
    CHECK(p.total_qubits() == 18);
    CHECK(p.size(1) == 6);
    CHECK(p.offset(1) == 0);
    CHECK(p.offset(2) == 6);
    CHECK(p.offset(3) == 12);
    CHECK(p.total_dim() == (1ull << 18));
}

TEST_CASE("register_value extracts the right bit field") {
    const RegisterPartition p({2, 3});
    // register 1 holds the low 3 bits, register 2 the top 2.
    const std::uint64_t index = (0b10ull << 3) | 0b110ull;
    CHECK(p.register_value(index, 1) == 0b110);
    CHECK(p.register_value(index, 2) == 0b10);
    CHECK(p.mask(1) == 0b00111);
    CHECK(p.mask(2) == 0b11000);
}

TEST_CASE("target bits read left to right from the outermost register") {
    const RegisterPartition p({2, 3});
    // "10|110": register 2 = 10, register 1 = 110.
    const std::uint64_t x = qsearch::parse_target_bits("10110", p);
    CHECK(p.register_value(x, 2) == 0b10);
    CHECK(p.register_value(x, 1) == 0b110);
    CHECK(qsearch::format_target_bits(x, p) == "10110");
}

TEST_CASE("all-ones shorthand") {
    const RegisterPartition p({3, 2});
    CHECK(qsearch::parse_target_bits("all-ones", p) == p.total_dim() - 1);
    CHECK(qsearch::format_target_bits(p.total_dim() - 1, p) == "11111");
}

TEST_CASE("round trip over every index of a small partition") {
    const RegisterPartition p({2, 2});
    for (std::uint64_t v = 0; v < p.total_dim(); ++v)
        CHECK(qsearch::parse_target_bits(qsearch::format_target_bits(v, p),
                                         p) == v);
}

TEST_CASE("construction rejects bad shapes") {
    CHECK_THROWS_AS(RegisterPartition({}), ConfigError);
    CHECK_THROWS_AS(RegisterPartition({3, 0}), ConfigError);
    CHECK_THROWS_AS(RegisterPartition({3, -1}), ConfigError);
    CHECK_THROWS_AS(RegisterPartition({32, 32}), ConfigError);
}

TEST_CASE("register accessors reject out-of-range indices") {
    const RegisterPartition p({4, 4});
    CHECK_THROWS_AS(p.size(0), ConfigError);
    CHECK_THROWS_AS(p.size(3), ConfigError);
    CHECK_THROWS_AS(p.offset(-1), ConfigError);
}

TEST_CASE("target parsing rejects malformed strings") {
    const RegisterPartition p({2, 2});
    CHECK_THROWS_AS(qsearch::parse_target_bits("101", p), ConfigError);
    CHECK_THROWS_AS(qsearch::parse_target_bits("10111", p), ConfigError);
    CHECK_THROWS_AS(qsearch::parse_target_bits("10x1", p), ConfigError);
    CHECK_THROWS_AS(qsearch::parse_target_bits("", p), ConfigError);
}

TEST_CASE("equality compares the size lists") {
    CHECK(RegisterPartition({3, 2}) == RegisterPartition({3, 2}));
    CHECK(!(RegisterPartition({3, 2}) == RegisterPartition({2, 3})));
}

} // TEST_SUITE
