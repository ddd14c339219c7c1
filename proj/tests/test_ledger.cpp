#include <doctest.h>

#include <bit>
#include <functional>
#include <sstream>

#include "pom/errors.hpp"
#include "pom/ledger.hpp"

using namespace pom;
using namespace pom::ledger;

namespace {

std::vector<Transaction> sample_txs(std::uint64_t round) {
    return {{round, 7, 3, 0.81}, {round, 2, 9, 0.66}, {round, 5, 1, 0.93}};
}

Chain three_blocks() {
    Chain c;
    for (std::uint64_t t = 1; t <= 3; ++t)
        c = append_block(std::move(c), t, SolverId{static_cast<std::uint32_t>(t % 2)},
                         sample_txs(t));
    return c;
}

std::uint64_t flip_bit(std::uint64_t v, int bit) { return v ^ (std::uint64_t{1} << bit); }

double flip_bit(double v, int bit) {
    return std::bit_cast<double>(std::bit_cast<std::uint64_t>(v) ^ (std::uint64_t{1} << bit));
}

} // namespace

TEST_CASE("append_block links blocks") {
    auto c = append_block({}, 1, SolverId{0}, sample_txs(1));
    REQUIRE(c.size() == 1);
    CHECK(c[0].height == 0);
    CHECK(c[0].prev_hash == kZeroDigest);
    CHECK(c[0].hash == compute_hash(c[0]));
    c = append_block(std::move(c), 2, SolverId{1}, {});
    CHECK(c[1].height == 1);
    CHECK(c[1].prev_hash == c[0].hash);
    CHECK_FALSE(verify_chain(c).has_value());

    const auto again = append_block({}, 1, SolverId{0}, sample_txs(1));
    CHECK(again[0].hash == c[0].hash);
    CHECK(to_hex(c[0].hash).size() == 64);
    CHECK(digest_from_hex(to_hex(c[1].hash)) == c[1].hash);
    CHECK_THROWS(digest_from_hex("abc"));
}

TEST_CASE("transactions are hashed in canonical order") {
    auto txs = sample_txs(4);
    auto reversed = txs;
    std::reverse(reversed.begin(), reversed.end());
    const auto a = append_block({}, 4, SolverId{2}, txs);
    const auto b = append_block({}, 4, SolverId{2}, reversed);
    CHECK(a[0].hash == b[0].hash);
    CHECK(a[0].transactions.front().rider_id == 2);
}

TEST_CASE("verify_chain reports tampering") {
    const Chain good = three_blocks();
    CHECK_FALSE(verify_chain(good).has_value());
    CHECK_FALSE(verify_chain(Chain{}).has_value());

    SUBCASE("mutated utility") {
        Chain c = good;
        c[1].transactions[0].utility += 1e-9;
        CHECK(verify_chain(c) == std::optional<std::size_t>{1});
    }
    SUBCASE("swapped blocks") {
        Chain c = good;
        std::swap(c[1], c[2]);
        CHECK(verify_chain(c) == std::optional<std::size_t>{1});
        Chain d = good;
        std::swap(d[0], d[2]);
        CHECK(verify_chain(d) == std::optional<std::size_t>{0});
    }
    SUBCASE("dropped block") {
        Chain c = good;
        c.erase(c.begin() + 1);
        CHECK(verify_chain(c) == std::optional<std::size_t>{1});
    }
}

TEST_CASE("every single-bit flip of every field is detected") {
    const Chain good = three_blocks();
    using Mutator = std::function<void(Block&, int)>;
    const std::vector<std::pair<const char*, Mutator>> fields{
        {"height", [](Block& b, int i) { b.height = flip_bit(b.height, i); }},
        {"round", [](Block& b, int i) { b.round = flip_bit(b.round, i); }},
        {"winner",
         [](Block& b, int i) { b.winner.value ^= std::uint32_t{1} << (i % 32); }},
        {"prev_hash", [](Block& b, int i) { b.prev_hash[i % 32] ^= std::uint8_t(1u << (i % 8)); }},
        {"hash", [](Block& b, int i) { b.hash[(i * 5) % 32] ^= std::uint8_t(1u << (i % 8)); }},
        {"tx.round",
         [](Block& b, int i) { b.transactions[1].round = flip_bit(b.transactions[1].round, i); }},
        {"tx.rider",
         [](Block& b, int i) {
             b.transactions[2].rider_id = flip_bit(b.transactions[2].rider_id, i);
         }},
        {"tx.driver",
         [](Block& b, int i) {
             b.transactions[0].driver_id = flip_bit(b.transactions[0].driver_id, i);
         }},
        {"tx.utility",
         [](Block& b, int i) {
             b.transactions[0].utility = flip_bit(b.transactions[0].utility, i);
         }},
    };
    for (std::size_t k = 0; k < good.size(); ++k)
        for (const auto& [name, mutate] : fields)
            for (int bit = 0; bit < 64; ++bit) {
                Chain c = good;
                mutate(c[k], bit);
                INFO(name, " block ", k, " bit ", bit);
                CHECK(verify_chain(c) == std::optional<std::size_t>{k});
            }
}

TEST_CASE("append_block preserves validity inductively") {
    Chain c;
    for (std::uint64_t t = 1; t <= 50; ++t) {
        std::vector<Transaction> txs;
        for (std::uint64_t i = 0; i < t % 5; ++i) txs.push_back({t, 100 - i, i, 0.1 * i});
        c = append_block(std::move(c), t, SolverId{static_cast<std::uint32_t>(t % 3)}, txs);
        CHECK_FALSE(verify_chain(c).has_value());
    }
}

TEST_CASE("validate_block against the round's accepted matches") {
    Rng rng(4);
    auto inst = ride::build_instance(4, 4, rng);
    inst.riders[0].acceptance_threshold = 2.0;   // rider 0 always rejects
    for (std::size_t i = 1; i < 4; ++i) inst.riders[i].acceptance_threshold = 0.0;
    const auto sol = ride::optimal_match(inst);
    const auto resp = ride::rider_responses(inst, sol);
    REQUIRE(resp.accepted.size() == 3);
    const RoundContext ctx{9, SolverId{2}, &inst, &sol, &resp};

    const auto txs = transactions_for(9, inst, resp);
    CHECK(txs.size() == 3);
    const auto ok = append_block({}, 9, SolverId{2}, txs);
    CHECK(validate_block(ok[0], ctx).accepted());

    auto extra = txs;
    extra.push_back({9, inst.riders[0].id, inst.drivers[sol.pairs[0].driver].id, 0.5});
    CHECK(validate_block(append_block({}, 9, SolverId{2}, extra)[0], ctx).reason ==
          RejectReason::UnknownMatch);

    auto missing = txs;
    missing.pop_back();
    CHECK(validate_block(append_block({}, 9, SolverId{2}, missing)[0], ctx).reason ==
          RejectReason::Incomplete);

    CHECK(validate_block(append_block({}, 8, SolverId{2}, txs)[0], ctx).reason ==
          RejectReason::WrongRound);
    CHECK(validate_block(append_block({}, 9, SolverId{1}, txs)[0], ctx).reason ==
          RejectReason::WrongWinner);
    auto forged = ok[0];
    forged.transactions[0].utility = 0.0;
    CHECK(validate_block(forged, ctx).reason == RejectReason::BadHash);
}

TEST_CASE("export and import round trip") {
    const Chain c = three_blocks();
    std::stringstream ss;
    export_chain(ss, c);
    const Chain back = import_chain(ss);
    REQUIRE(back.size() == c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(back[i].hash == c[i].hash);
        CHECK(back[i].prev_hash == c[i].prev_hash);
        CHECK(back[i].transactions == c[i].transactions);
        CHECK(back[i].winner == c[i].winner);
    }
    CHECK_FALSE(verify_chain(back).has_value());

    std::stringstream junk("# pom-chain v1\n0 1 2 zz\n");
    CHECK_THROWS(import_chain(junk));
    std::stringstream wrong_header("hello\n");
    CHECK_THROWS(import_chain(wrong_header));
}
