#include "eci/matching.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace eci;

namespace {

Agent agent_from_dense(const UnitUniverse& u, const std::vector<std::uint8_t>& bits) {
    Agent a;
    a.agent_id = AgentId{0};
    a.interests = UnitVector::from_dense(u, bits);
    return a;
}

KnowledgeFile file_from_dense(const UnitUniverse& u, const std::vector<std::uint8_t>& bits) {
    KnowledgeFile f;
    f.file_id = FileId{0};
    f.units = UnitVector::from_dense(u, bits);
    return f;
}

// Independent oracle: scan coordinates directly.
bool any_shared_unit(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && b[i]) return true;
    }
    return false;
}

}  // namespace

TEST(AgentFileMatch, OneSharedCoordinate) {
    const UnitUniverse u{3};
    const auto r = match_agent_file(agent_from_dense(u, {0, 1, 1}), file_from_dense(u, {1, 0, 1}));
    EXPECT_TRUE(r.matched);
    EXPECT_EQ(r.degree, 1u);
}

TEST(AgentFileMatch, DisjointVectorsDoNotMatch) {
    const UnitUniverse u{3};
    const auto r = match_agent_file(agent_from_dense(u, {0, 1, 0}), file_from_dense(u, {1, 0, 0}));
    EXPECT_FALSE(r.matched);
    EXPECT_EQ(r.degree, 0u);
}

TEST(AgentFileMatch, FullOverlap) {
    const UnitUniverse u{3};
    const auto r = match_agent_file(agent_from_dense(u, {1, 1, 1}), file_from_dense(u, {1, 1, 1}));
    EXPECT_TRUE(r.matched);
    EXPECT_EQ(r.degree, 3u);
}

TEST(AgentFileMatch, DimensionMismatchRejected) {
    Agent a = agent_from_dense(UnitUniverse{3}, {1, 0, 0});
    KnowledgeFile f = file_from_dense(UnitUniverse{4}, {1, 0, 0, 0});
    EXPECT_THROW(match_agent_file(a, f), std::invalid_argument);
}

TEST(FileFileMatch, DirectInnerProduct) {
    const UnitUniverse u{3};
    const auto r = match_file_file(file_from_dense(u, {1, 0, 1}), file_from_dense(u, {1, 1, 0}));
    EXPECT_EQ(r.degree, 1u);
    EXPECT_TRUE(r.matched);
}

TEST(FileFileMatch, ZeroVectorNeverMatches) {
    const UnitUniverse u{3};
    const auto r = match_file_file(file_from_dense(u, {0, 0, 0}), file_from_dense(u, {1, 1, 1}));
    EXPECT_EQ(r.degree, 0u);
    EXPECT_FALSE(r.matched);
}

TEST(FileFileMatch, SelfInnerProduct) {
    const UnitUniverse u{3};
    const auto f = file_from_dense(u, {1, 0, 1});
    const auto r = match_file_file(f, f);
    EXPECT_EQ(r.degree, 2u);
}

// matched must be degree >= 1 in every case.
TEST(Match, MatchedFlagIsDegreeAtLeastOne) {
    std::mt19937 gen(5);
    const UnitUniverse u{12};
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<std::uint8_t> da(12), db(12);
        for (int i = 0; i < 12; ++i) {
            da[i] = gen() % 2;
            db[i] = gen() % 3 == 0;
        }
        const auto r = match_agent_file(agent_from_dense(u, da), file_from_dense(u, db));
        ASSERT_EQ(r.matched, r.degree >= 1);
    }
}

// Exhaustive check against the coordinate-scan oracle for every pair at m=6.
TEST(Match, ExhaustiveEquivalenceSmallDimension) {
    const std::uint32_t m = 6;
    const UnitUniverse u{m};
    std::vector<std::vector<std::uint8_t>> all;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::vector<std::uint8_t> bits(m);
        for (std::uint32_t i = 0; i < m; ++i) bits[i] = (mask >> i) & 1;
        all.push_back(bits);
    }
    for (const auto& da : all) {
        const Agent a = agent_from_dense(u, da);
        for (const auto& db : all) {
            const auto r = match_agent_file(a, file_from_dense(u, db));
            ASSERT_EQ(r.matched, any_shared_unit(da, db));
        }
    }
}

// Randomized equivalence at a larger dimension.
TEST(Match, RandomizedEquivalenceMediumDimension) {
    std::mt19937 gen(11);
    const UnitUniverse u{12};
    for (int trial = 0; trial < 100000; ++trial) {
        std::vector<std::uint8_t> da(12), db(12);
        for (int i = 0; i < 12; ++i) {
            da[i] = gen() % 2;
            db[i] = gen() % 2;
        }
        const auto r = match_agent_file(agent_from_dense(u, da), file_from_dense(u, db));
        ASSERT_EQ(r.matched, any_shared_unit(da, db));
    }
}

// Symmetry of the file-file form, exhaustive over all pairs at m=6 and
// sampled at m=12.
TEST(FileFileMatch, Symmetry) {
    const UnitUniverse u6{6};
    for (std::uint32_t x = 0; x < 64; ++x) {
        for (std::uint32_t y = 0; y < 64; ++y) {
            std::vector<std::uint8_t> da(6), db(6);
            for (std::uint32_t i = 0; i < 6; ++i) {
                da[i] = (x >> i) & 1;
                db[i] = (y >> i) & 1;
            }
            const auto f1 = file_from_dense(u6, da);
            const auto f2 = file_from_dense(u6, db);
            ASSERT_EQ(match_file_file(f1, f2).degree, match_file_file(f2, f1).degree);
            ASSERT_EQ(match_file_file(f1, f2).matched, match_file_file(f2, f1).matched);
        }
    }
    std::mt19937 gen(3);
    const UnitUniverse u12{12};
    for (int trial = 0; trial < 20000; ++trial) {
        std::vector<std::uint8_t> da(12), db(12);
        for (int i = 0; i < 12; ++i) {
            da[i] = gen() % 2;
            db[i] = gen() % 2;
        }
        const auto f1 = file_from_dense(u12, da);
        const auto f2 = file_from_dense(u12, db);
        ASSERT_EQ(match_file_file(f1, f2).degree, match_file_file(f2, f1).degree);
    }
}

// Growing an interest set can only gain matches, never lose them.
TEST(Match, MonotoneInAgentInterests) {
    std::mt19937 gen(17);
    const UnitUniverse u{16};
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<std::uint8_t> da(16, 0), db(16, 0);
        for (int i = 0; i < 16; ++i) {
            da[i] = gen() % 4 == 0;
            db[i] = gen() % 4 == 0;
        }
        const bool before =
            match_agent_file(agent_from_dense(u, da), file_from_dense(u, db)).matched;
        std::vector<std::uint8_t> grown = da;
        grown[gen() % 16] = 1;
        const bool after =
            match_agent_file(agent_from_dense(u, grown), file_from_dense(u, db)).matched;
        ASSERT_TRUE(!before || after);
    }
}

// The pluggable-responder default behaves exactly like the predicate.
TEST(Match, SyntheticResponderAgreesWithPredicate) {
    std::mt19937 gen(23);
    const UnitUniverse u{10};
    const SyntheticResponder responder;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::uint8_t> da(10), db(10);
        for (int i = 0; i < 10; ++i) {
            da[i] = gen() % 2;
            db[i] = gen() % 2;
        }
        const Agent a = agent_from_dense(u, da);
        const KnowledgeFile f = file_from_dense(u, db);
        ASSERT_EQ(responder.matches(a, f), match_agent_file(a, f).matched);
    }
}
