#include "pom/ledger.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

#include "pom/errors.hpp"

namespace pom::ledger {

namespace {

void put_u64(std::vector<std::uint8_t>& buf, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8)
        buf.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_u32(std::vector<std::uint8_t>& buf, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8)
        buf.push_back(static_cast<std::uint8_t>(v >> shift));
}

Digest sha256(std::span<const std::uint8_t> data) {
    using Ctx = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;
    Ctx ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    Digest out{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size())
        throw std::runtime_error("SHA-256 computation failed");
    return out;
}

std::string u64_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

bool tx_less(const Transaction& a, const Transaction& b) {
    if (a.rider_id != b.rider_id) return a.rider_id < b.rider_id;
    if (a.driver_id != b.driver_id) return a.driver_id < b.driver_id;
    return std::bit_cast<std::uint64_t>(a.utility) < std::bit_cast<std::uint64_t>(b.utility);
}

} // namespace

std::string to_hex(const Digest& d) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (auto b : d) {
        s.push_back(kHex[b >> 4]);
        s.push_back(kHex[b & 0xf]);
    }
    return s;
}

Digest digest_from_hex(const std::string& hex) {
    if (hex.size() != 64) throw UsageError("digest hex must be 64 characters");
    auto nibble = [](char c) -> std::uint8_t {
        if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
        throw UsageError("invalid hex digit in digest");
    };
    Digest d{};
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    return d;
}

void canonicalize(std::vector<Transaction>& txs) {
    std::sort(txs.begin(), txs.end(), tx_less);
}

Digest compute_hash(const Block& block) {
    std::vector<std::uint8_t> buf;
    buf.reserve(60 + 32 * block.transactions.size());
    put_u64(buf, block.height);
    buf.insert(buf.end(), block.prev_hash.begin(), block.prev_hash.end());
    put_u64(buf, block.round);
    put_u32(buf, block.winner.value);
    put_u64(buf, block.transactions.size());
    for (const auto& tx : block.transactions) {
        put_u64(buf, tx.round);
        put_u64(buf, tx.rider_id);
        put_u64(buf, tx.driver_id);
        put_u64(buf, std::bit_cast<std::uint64_t>(tx.utility));
    }
    return sha256(buf);
}

Chain append_block(Chain chain, std::uint64_t round, SolverId winner,
                   std::vector<Transaction> transactions) {
    Block b;
    b.height = chain.size();
    b.prev_hash = chain.empty() ? kZeroDigest : chain.back().hash;
    b.round = round;
    b.winner = winner;
    b.transactions = std::move(transactions);
    canonicalize(b.transactions);
    b.hash = compute_hash(b);
    chain.push_back(std::move(b));
    return chain;
}

std::optional<std::size_t> verify_chain(std::span<const Block> chain) {
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const Block& b = chain[i];
        const Digest& expected_prev = i == 0 ? kZeroDigest : chain[i - 1].hash;
        if (b.height != i || b.prev_hash != expected_prev || compute_hash(b) != b.hash)
            return i;
    }
    return std::nullopt;
}

const char* to_string(RejectReason reason) {
    switch (reason) {
    case RejectReason::None: return "accepted";
    case RejectReason::WrongRound: return "wrong round";
    case RejectReason::WrongWinner: return "wrong winner";
    case RejectReason::UnknownMatch: return "unknown match";
    case RejectReason::Incomplete: return "incomplete";
    case RejectReason::BadHash: return "bad hash";
    }
    return "unknown";
}

std::vector<Transaction> transactions_for(std::uint64_t round,
                                          const ride::MatchingInstance& instance,
                                          const ride::RiderResponses& responses) {
    std::vector<Transaction> txs;
    txs.reserve(responses.accepted.size());
    for (const auto& a : responses.accepted)
        txs.push_back({round, instance.riders[a.rider].id, instance.drivers[a.driver].id,
                       instance.utility(a.rider, a.driver)});
    canonicalize(txs);
    return txs;
}

BlockValidation validate_block(const Block& block, const RoundContext& ctx) {
    if (ctx.instance == nullptr || ctx.winning_solution == nullptr || ctx.responses == nullptr)
        throw UsageError("round context is incomplete");
    if (block.round != ctx.round) return {RejectReason::WrongRound, "block records another round"};
    if (block.winner != ctx.winner)
        return {RejectReason::WrongWinner, "block signed by a non-winner"};
    if (compute_hash(block) != block.hash)
        return {RejectReason::BadHash, "digest does not match content"};

    // Accepted matches must come from the winning solution.
    for (const auto& a : ctx.responses->accepted) {
        if (std::find(ctx.winning_solution->pairs.begin(), ctx.winning_solution->pairs.end(), a) ==
            ctx.winning_solution->pairs.end())
            throw UsageError("accepted match is not part of the winning solution");
    }

    const auto expected = transactions_for(ctx.round, *ctx.instance, *ctx.responses);
    std::vector<bool> seen(expected.size(), false);
    for (const auto& tx : block.transactions) {
        auto it = std::find(expected.begin(), expected.end(), tx);
        if (it == expected.end())
            return {RejectReason::UnknownMatch,
                    "rider " + std::to_string(tx.rider_id) + " / driver " +
                        std::to_string(tx.driver_id) + " is not an accepted match"};
        auto idx = static_cast<std::size_t>(it - expected.begin());
        if (seen[idx])
            return {RejectReason::UnknownMatch,
                    "duplicate transaction for rider " + std::to_string(tx.rider_id)};
        seen[idx] = true;
    }
    for (std::size_t i = 0; i < expected.size(); ++i)
        if (!seen[i])
            return {RejectReason::Incomplete,
                    "accepted match for rider " + std::to_string(expected[i].rider_id) +
                        " is missing"};
    return {};
}

void export_chain(std::ostream& out, std::span<const Block> chain) {
    out << "# pom-chain v1\n";
    for (const auto& b : chain) {
        out << b.height << ' ' << b.round << ' ' << b.winner.value << ' ' << to_hex(b.prev_hash)
            << ' ' << to_hex(b.hash) << ' ' << b.transactions.size();
        for (const auto& tx : b.transactions)
            out << ' ' << tx.rider_id << ':' << tx.driver_id << ':'
                << u64_hex(std::bit_cast<std::uint64_t>(tx.utility));
        out << '\n';
    }
}

Chain import_chain(std::istream& in) {
    Chain chain;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        Block b;
        std::string prev, hash;
        std::size_t n = 0;
        if (!(ls >> b.height >> b.round >> b.winner.value >> prev >> hash >> n))
            throw UsageError("chain line " + std::to_string(line_no) + ": malformed header");
        b.prev_hash = digest_from_hex(prev);
        b.hash = digest_from_hex(hash);
        for (std::size_t k = 0; k < n; ++k) {
            std::string field;
            if (!(ls >> field))
                throw UsageError("chain line " + std::to_string(line_no) + ": missing transaction");
            Transaction tx;
            tx.round = b.round;
            unsigned long long rider = 0, driver = 0, bits = 0;
            if (std::sscanf(field.c_str(), "%llu:%llu:%llx", &rider, &driver, &bits) != 3)
                throw UsageError("chain line " + std::to_string(line_no) +
                                 ": malformed transaction '" + field + "'");
            tx.rider_id = rider;
            tx.driver_id = driver;
            tx.utility = std::bit_cast<double>(static_cast<std::uint64_t>(bits));
            b.transactions.push_back(tx);
        }
        chain.push_back(std::move(b));
    }
    return chain;
}

} // namespace pom::ledger
