#include "c3h/rng.hpp"
#include "c3h/trust_ledger.hpp"

#include <doctest.h>

#include <cstdint>
#include <numeric>

using namespace c3h;

namespace
{

// Trust as a reduced fraction (earn - loose) / earn.
struct Ratio
{
    std::uint64_t num;
    std::uint64_t den;
};

Ratio exact_trust(const TrustRecord& r)
{
    const std::uint64_t num = r.earn_trust - r.loose_trust;
    const std::uint64_t g = std::gcd(num, r.earn_trust);
    return {num / g, r.earn_trust / g};
}

double as_double(Ratio r)
{
    return static_cast<double>(r.num) / static_cast<double>(r.den);
}

} // namespace

TEST_CASE("initial trust")
{
    CHECK(init_trust() == TrustRecord{2, 1});
    CHECK(trust_value(init_trust()) == 0.5);
    CHECK(init_trust() == init_trust());
}

TEST_CASE("trust value against exact ratios")
{
    CHECK(trust_value({2, 1}) == 0.5);
    CHECK(trust_value({3, 1}) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    for (std::uint64_t k = 2; k < 50; ++k)
    {
        CHECK(trust_value({k, k}) == 0.0);
    }
    for (std::uint64_t e = 2; e < 60; ++e)
    {
        for (std::uint64_t l = 1; l <= e; ++l)
        {
            const TrustRecord r{e, l};
            const Ratio q = exact_trust(r);
            REQUIRE(std::abs(trust_value(r) - as_double(q)) <= 1e-12);
            REQUIRE(trust_value(r) >= 0.0);
            REQUIRE(trust_value(r) < 1.0);
            REQUIRE((trust_value(r) == 0.0) == (l == e));
        }
    }
}

TEST_CASE("forwarding credit")
{
    CHECK(on_forward_success({2, 1}) == TrustRecord{3, 1});
    CHECK(trust_value(on_forward_success({2, 1})) == doctest::Approx(2.0 / 3.0));
    const TrustRecord twice = on_forward_success(on_forward_success(init_trust()));
    CHECK(twice == TrustRecord{4, 1});
    CHECK(trust_value(twice) == 0.75);
    for (std::uint64_t l = 1; l < 10; ++l)
    {
        const TrustRecord r{10, l};
        CHECK(trust_value(on_forward_success(r)) > trust_value(r));
    }
}

TEST_CASE("selfish penalty")
{
    CHECK(on_selfish({3, 1}) == TrustRecord{3, 2});
    CHECK(trust_value(on_selfish({3, 1})) == doctest::Approx(1.0 / 3.0));
    CHECK(on_selfish({2, 2}) == TrustRecord{2, 2});
    CHECK(on_selfish(on_selfish(on_selfish({4, 1}))) == TrustRecord{4, 4});
}

TEST_CASE("malicious verdict zeroes trust")
{
    CHECK(on_malicious({10, 1}) == TrustRecord{10, 10});
    CHECK(on_malicious({2, 1}) == TrustRecord{2, 2});
    CHECK(on_malicious(on_malicious({7, 3})) == on_malicious({7, 3}));
    Rng rng(5);
    for (int i = 0; i < 200; ++i)
    {
        const std::uint64_t e = 2 + rng.below(1000);
        const std::uint64_t l = 1 + rng.below(e);
        CHECK(trust_value(on_malicious({e, l})) == 0.0);
    }
}

TEST_CASE("service charge")
{
    CHECK(on_service_charge({4, 1}) == TrustRecord{4, 2});
    CHECK(on_service_charge({2, 2}) == TrustRecord{2, 2});
    // A charged node recovers by forwarding for others.
    const TrustRecord charged = on_service_charge(init_trust());
    CHECK(trust_value(charged) == 0.0);
    CHECK(trust_value(on_forward_success(charged)) > 0.0);
}

TEST_CASE("penalties never raise trust")
{
    Rng rng(8);
    for (int i = 0; i < 500; ++i)
    {
        const std::uint64_t e = 2 + rng.below(200);
        const TrustRecord r{e, 1 + rng.below(e)};
        CHECK(trust_value(on_selfish(r)) <= trust_value(r));
        CHECK(trust_value(on_service_charge(r)) <= trust_value(r));
    }
}

TEST_CASE("credit and penalty commute when no clamp fires")
{
    Rng rng(13);
    for (int i = 0; i < 500; ++i)
    {
        const std::uint64_t e = 3 + rng.below(200);
        const TrustRecord r{e, 1 + rng.below(e - 2)};
        CHECK(on_selfish(on_forward_success(r)) == on_forward_success(on_selfish(r)));
    }
}

TEST_CASE("eligibility and blacklist threshold")
{
    CHECK(is_eligible({2, 1}));
    CHECK_FALSE(is_eligible({5, 5}));
    CHECK(is_eligible({100, 99}));

    CHECK(is_blacklisted({2, 2}, 0.1));
    CHECK_FALSE(is_blacklisted({2, 1}, 0.1));
    CHECK_FALSE(is_blacklisted({2, 2}, 0.0));
    CHECK_FALSE(is_blacklisted({10, 9}, 0.1)); // exactly at the limit
    CHECK(is_blacklisted({11, 10}, 0.1));
}

TEST_CASE("ledger and blacklist containers")
{
    TrustLedger ledger;
    CHECK(ledger.admit(4) == init_trust());
    ledger.at(4) = on_forward_success(ledger.at(4));
    CHECK(ledger.admit(4) == TrustRecord{3, 1}); // existing record kept
    const auto taken = ledger.take(4);
    REQUIRE(taken);
    CHECK(*taken == TrustRecord{3, 1});
    CHECK_FALSE(ledger.contains(4));
    CHECK_FALSE(ledger.take(4));

    Blacklist list;
    CHECK(list.insert({7, Offence::DataDropping, 1.0, 2}));
    CHECK_FALSE(list.insert({7, Offence::Slander, 2.0, 3}));
    CHECK(list.entries().at(7).reason == Offence::DataDropping);
    CHECK(list.contains(7));
    CHECK(to_string(Offence::Impersonation) == "impersonation");
}
