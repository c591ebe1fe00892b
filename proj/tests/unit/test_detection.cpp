#include "c3h/detection.hpp"
#include "c3h/rng.hpp"

#include <doctest.h>

using namespace c3h;

namespace
{

// Opens and resolves one entry per (status, res_eng, mobility, context) tuple.
struct Watch
{
    SurveillanceLedger ledger;
    PacketId next = 1;

    void add(NodeId g, AckStatus status, double res, double mob, LinkContext ctx = LinkContext::LinkOk)
    {
        const PacketId id = next++;
        ledger.open(g, id, 0.0, res, mob);
        if (status != AckStatus::Pending)
        {
            ledger.resolve(g, id, status, ctx);
        }
    }
};

Packet report(NodeId reporter, NodeId target)
{
    Packet p;
    p.kind = PacketKind::TrustReport;
    p.src = reporter;
    p.link = reporter;
    p.subject = target;
    return p;
}

// 0 {1,2} --2,11-- 10 {11,12}; 30 is a head with no shared gateway.
ClusterMap two_clusters()
{
    ClusterMap map(40);
    map.make_head(0);
    map.make_head(10);
    map.make_head(30);
    map.add_member(0, 1);
    map.add_member(0, 2);
    map.add_member(10, 11);
    map.add_member(10, 12);
    map.add_member(30, 31);
    map.set_link(ChPair::of(0, 10), {2, 11});
    return map;
}

} // namespace

TEST_CASE("ledger entries move from pending exactly once")
{
    SurveillanceLedger l;
    CHECK(l.open(5, 1, 0.0, 0.9, 1.0));
    CHECK_FALSE(l.open(5, 1, 0.5, 0.9, 1.0));
    CHECK(l.pending(1) == std::vector<NodeId>{5});
    CHECK_FALSE(l.resolve(5, 1, AckStatus::Pending));
    CHECK(l.resolve(5, 1, AckStatus::Acked));
    CHECK_FALSE(l.resolve(5, 1, AckStatus::Timeout));
    CHECK(l.find(5, 1)->status == AckStatus::Acked);
    CHECK(l.pending(1).empty());
    CHECK_FALSE(l.resolve(6, 1, AckStatus::Acked));
    CHECK(l.find(6, 1) == nullptr);
    CHECK(l.size() == 1);
}

TEST_CASE("forwarding verdicts")
{
    const DetectionThresholds th;
    Watch w;

    SUBCASE("three culpable drops make a malicious verdict")
    {
        for (int i = 0; i < 3; ++i)
        {
            w.add(7, AckStatus::Timeout, 0.9, 1.0);
        }
        const Verdict v = judge_forwarding(w.ledger, 7, th);
        CHECK(v.kind == VerdictKind::Malicious);
        CHECK(v.offence == Offence::DataDropping);
        CHECK(v.target == 7);
        CHECK(v.evidence == std::vector<PacketId>{1, 2, 3});
    }

    SUBCASE("an exhausted gateway is not accused")
    {
        w.add(7, AckStatus::Timeout, 0.05, 1.0);
        CHECK(judge_forwarding(w.ledger, 7, th).kind == VerdictKind::Inconclusive);
    }

    SUBCASE("all acknowledged is normal")
    {
        for (int i = 0; i < 5; ++i)
        {
            w.add(7, AckStatus::Acked, 0.9, 1.0);
        }
        CHECK(judge_forwarding(w.ledger, 7, th).kind == VerdictKind::Normal);
    }

    SUBCASE("fast motion or a broken link excuses silence")
    {
        for (int i = 0; i < 3; ++i)
        {
            w.add(7, AckStatus::Timeout, 0.9, 20.0);
            w.add(8, AckStatus::Timeout, 0.9, 1.0, LinkContext::LinkBroken);
        }
        CHECK(judge_forwarding(w.ledger, 7, th).kind == VerdictKind::Inconclusive);
        CHECK(judge_forwarding(w.ledger, 8, th).kind == VerdictKind::Inconclusive);
    }

    SUBCASE("moderate energy gives a selfish verdict")
    {
        for (int i = 0; i < 3; ++i)
        {
            w.add(7, AckStatus::Timeout, 0.45, 1.0);
        }
        const Verdict v = judge_forwarding(w.ledger, 7, th);
        CHECK(v.kind == VerdictKind::Selfish);
        CHECK(v.offence == Offence::Selfishness);
    }

    SUBCASE("below threshold stays inconclusive")
    {
        w.add(7, AckStatus::Timeout, 0.9, 1.0);
        w.add(7, AckStatus::Timeout, 0.9, 1.0);
        CHECK(judge_forwarding(w.ledger, 7, th).kind == VerdictKind::Inconclusive);
    }

    SUBCASE("consumed evidence is not reused")
    {
        for (int i = 0; i < 3; ++i)
        {
            w.add(7, AckStatus::Timeout, 0.45, 1.0);
        }
        w.add(7, AckStatus::Acked, 0.9, 1.0);
        w.ledger.consume(7, {1, 2, 3});
        CHECK(judge_forwarding(w.ledger, 7, th).kind == VerdictKind::Normal);
    }

    SUBCASE("no resolved entries")
    {
        w.add(7, AckStatus::Pending, 0.9, 1.0);
        for (NodeId g : {NodeId{7}, NodeId{99}})
        {
            try
            {
                judge_forwarding(w.ledger, g, th);
                FAIL("expected NoEvidence");
            }
            catch (const Error& e)
            {
                CHECK(e.code() == ErrorCode::NoEvidence);
            }
        }
    }
}

TEST_CASE("honest gateways are never accused")
{
    // Whatever the mix of acks and excused timeouts, no verdict is adverse.
    const DetectionThresholds th;
    Rng rng(21);
    for (int round = 0; round < 300; ++round)
    {
        Watch w;
        const std::size_t n = 1 + rng.below(30);
        for (std::size_t i = 0; i < n; ++i)
        {
            switch (rng.below(4))
            {
            case 0:
                w.add(3, AckStatus::Acked, rng.uniform(0, 1), rng.uniform(0, 40));
                break;
            case 1:
                w.add(3, AckStatus::Timeout, rng.uniform(0, 0.39), rng.uniform(0, 5));
                break;
            case 2:
                w.add(3, AckStatus::Timeout, rng.uniform(0.5, 1), rng.uniform(5.01, 40));
                break;
            default:
                w.add(3, AckStatus::Timeout, rng.uniform(0, 1), rng.uniform(0, 40), LinkContext::LinkBroken);
                break;
            }
        }
        const VerdictKind k = judge_forwarding(w.ledger, 3, th).kind;
        REQUIRE(k != VerdictKind::Malicious);
        REQUIRE(k != VerdictKind::Selfish);
    }
}

TEST_CASE("identity checks against the link registry")
{
    LinkRegistry links;
    links.enroll(9, 9);
    links.enroll(4, 4);

    const Verdict spoofed = verify_identity(links, 9, 4);
    CHECK(spoofed.kind == VerdictKind::Malicious);
    CHECK(spoofed.target == 9);
    CHECK(spoofed.offence == Offence::Impersonation);

    CHECK(verify_identity(links, 4, 4).kind == VerdictKind::Normal);

    try
    {
        verify_identity(links, 17, 4);
        FAIL("expected UnknownLink");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::UnknownLink);
    }
}

TEST_CASE("trust reports never reach the target")
{
    SlanderMonitor monitor;
    int flagged = 0;
    for (int i = 0; i < 10; ++i)
    {
        if (handle_trust_report(monitor, 0, report(6, 2), 5) == ReportOutcome::ReporterSelfish)
        {
            ++flagged;
        }
    }
    // The sixth report crosses the limit; the count restarts, so ten reports flag once.
    CHECK(flagged == 1);
    CHECK(monitor.count(6, 2) == 4);

    SlanderMonitor fresh;
    for (int i = 0; i < 20; ++i)
    {
        CHECK(handle_trust_report(fresh, 0, report(6, 0), 5) == ReportOutcome::Discarded);
    }
    CHECK(fresh.count(6, 0) == 0);

    Packet wrong = report(6, 2);
    wrong.kind = PacketKind::Data;
    CHECK(handle_trust_report(fresh, 0, wrong, 0) == ReportOutcome::Discarded);
}

TEST_CASE("route adverts are accepted from neighboring heads only")
{
    const ClusterMap map = two_clusters();
    RoutingTable table = RoutingTable::build(map, 0);
    const std::size_t before = table.size();

    Packet bogus;
    bogus.kind = PacketKind::RouteAdvert;
    bogus.src = 1;
    bogus.link = 1;
    for (int i = 0; i < 1000; ++i)
    {
        bogus.advertised = {static_cast<NodeId>(40 + i)};
        CHECK_FALSE(handle_route_advert(table, 0, bogus, map));
    }
    CHECK(table.size() == before);

    // Claiming to be a head does not help a member.
    bogus.from_ch = true;
    CHECK_FALSE(handle_route_advert(table, 0, bogus, map));
    // Nor does a real head that shares no gateway.
    bogus.src = bogus.link = 30;
    CHECK_FALSE(handle_route_advert(table, 0, bogus, map));
    CHECK(table.size() == before);

    Packet genuine;
    genuine.kind = PacketKind::RouteAdvert;
    genuine.src = genuine.link = 10;
    genuine.from_ch = true;
    genuine.advertised = {30};
    CHECK(handle_route_advert(table, 0, genuine, map));
    REQUIRE(table.find(30) != nullptr);
    CHECK(table.find(30)->next_head == 10);
    CHECK(to_string(VerdictKind::Inconclusive) == "inconclusive");
}
