#include <gtest/gtest.h>

#include "frsvt/predictor.hpp"

using namespace frsvt;

TEST(PredictorInit, Examples)
{
    PredictorState s = predictor_init(1000, 0.2);
    EXPECT_EQ(s.b, 200);
    EXPECT_EQ(s.l, 20);

    s = predictor_init(10, 1.0);
    EXPECT_EQ(s.b, 10);
    EXPECT_EQ(s.l, 1);

    s = predictor_init(1, 1.0);
    EXPECT_EQ(s.b, 1);
    EXPECT_EQ(s.l, 1);
}

TEST(PredictorInit, RejectsBadParameters)
{
    EXPECT_THROW(predictor_init(100, 0.0), InvalidArgument);
    EXPECT_THROW(predictor_init(100, 1.5), InvalidArgument);
    EXPECT_THROW(predictor_init(0, 0.5), InvalidArgument);
}

TEST(PredictorNext, RankBelowPrediction)
{
    PredictorState s = predictor_init(1000, 0.2);
    s.l = 12;
    const PredictorStep st = predictor_next(s, 10);
    EXPECT_EQ(st.p_next, 2);
    EXPECT_EQ(st.l_next, 12);
    EXPECT_EQ(s.l, 12);
    EXPECT_EQ(s.r, 10);
}

TEST(PredictorNext, RankAtPrediction)
{
    PredictorState s = predictor_init(1000, 0.2);
    ASSERT_EQ(s.l, 20);
    const PredictorStep st = predictor_next(s, 20);
    EXPECT_EQ(st.p_next, 50);
    EXPECT_EQ(st.l_next, 70);

    s.b = 60;
    s.l = 20;
    EXPECT_EQ(predictor_next(s, 20).l_next, 60);
}

TEST(PredictorNext, VanishedRank)
{
    PredictorState s = predictor_init(1000, 0.2);
    const PredictorStep st = predictor_next(s, 0);
    EXPECT_EQ(st.p_next, 2);
    EXPECT_EQ(st.l_next, 2);
}

TEST(PredictorNext, RejectsRankAboveRate)
{
    PredictorState s = predictor_init(100, 0.2);
    EXPECT_THROW(predictor_next(s, s.l + 1), InvalidArgument);
    EXPECT_THROW(predictor_next(s, -1), InvalidArgument);
}

TEST(PredictorProperties, NeverExceedsCapNorUndersamples)
{
    for (Index n : {7, 50, 333, 1000})
        for (double gamma : {0.05, 0.2, 0.7, 1.0})
        {
            PredictorState s = predictor_init(n, gamma);
            std::uint64_t x = static_cast<std::uint64_t>(n) * 2654435761u;
            for (int it = 0; it < 200; ++it)
            {
                x = x * 6364136223846793005ULL + 1442695040888963407ULL;
                const Index r = static_cast<Index>((x >> 33) % static_cast<std::uint64_t>(s.l + 1));
                const PredictorStep st = predictor_next(s, r);
                EXPECT_LE(st.l_next, s.b);
                EXPECT_GE(st.l_next, 1);
                EXPECT_GE(st.l_next, std::min(r, s.b));
                EXPECT_LE(s.b, n);
            }
        }
}

TEST(PredictorProperties, ConstantRankStabilizes)
{
    PredictorState s = predictor_init(1000, 0.2);
    const Index rstar = 15;
    // first observation is clamped to the starting rate
    predictor_next(s, std::min(rstar, s.l));
    predictor_next(s, std::min(rstar, s.l));
    EXPECT_EQ(s.l, rstar + s.a);
    for (int it = 0; it < 10; ++it)
    {
        predictor_next(s, rstar);
        EXPECT_EQ(s.l, rstar + s.a);
    }
}

TEST(PredictorProperties, SaturatedRankGrowsToCap)
{
    PredictorState s = predictor_init(1000, 0.2);
    Index prev = s.l;
    while (s.l < s.b)
    {
        predictor_next(s, s.l);
        EXPECT_EQ(s.l, std::min<Index>(prev + 50, s.b));
        prev = s.l;
    }
    EXPECT_EQ(s.l, 200);
}
