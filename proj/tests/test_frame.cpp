// SPDX-License-Identifier: Apache-2.0
#include "mcdm/frame.hpp"

#include <gtest/gtest.h>

using namespace mcdm;

TEST(FrameLayout, SmallComb) {
    const FrameLayout l(8, 2, 2, {1.0, -1.0});
    EXPECT_EQ(l.pilot_indices(), (std::vector<std::size_t>{0, 4}));
    EXPECT_EQ(l.null_indices(), (std::vector<std::size_t>{1, 7}));
    EXPECT_EQ(l.data_indices(), (std::vector<std::size_t>{2, 3, 5, 6}));
    EXPECT_EQ(l.spacing(), 4u);
    EXPECT_EQ(l.role(4), Role::Pilot);
    EXPECT_EQ(l.role(7), Role::Null);
    EXPECT_EQ(l.role(5), Role::Data);
}

TEST(FrameLayout, DefaultSizes) {
    const FrameLayout l = FrameLayout::comb(1024, 256, 56, 0x2C5);
    EXPECT_EQ(l.pilot_count(), 256u);
    EXPECT_EQ(l.null_count(), 56u);
    EXPECT_EQ(l.data_count(), 712u);
    EXPECT_EQ(l.spacing(), 4u);
    for (std::size_t i = 0; i < 256; ++i) EXPECT_EQ(l.pilot_indices()[i], 4 * i);
    EXPECT_EQ(l.pilot_symbols(), gen_pn(256, 0x2C5));
    // Roles partition the subcarriers.
    std::vector<int> seen(1024, 0);
    for (auto k : l.pilot_indices()) ++seen[k];
    for (auto k : l.null_indices()) ++seen[k];
    for (auto k : l.data_indices()) ++seen[k];
    for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(FrameLayout, RejectsBadShapes) {
    EXPECT_THROW(FrameLayout(10, 3, 0, {1, 1, 1}), std::invalid_argument);
    EXPECT_THROW(FrameLayout(8, 2, 7, {1, 1}), std::invalid_argument);
    EXPECT_THROW(FrameLayout(8, 2, 0, {1}), std::invalid_argument);
    EXPECT_THROW(FrameLayout(8, 2, 0, {1, 0.5}), std::invalid_argument);
}

TEST(BuildFrame, PlacesEverything) {
    const FrameLayout l(8, 2, 2, {1.0, -1.0});
    const CVec data{{1, 1}, {2, 0}, {0, 3}, {-4, 0}};
    const FrequencyFrame f = build_frame(data, l);
    const CVec want{1.0, 0.0, {1, 1}, {2, 0}, -1.0, {0, 3}, {-4, 0}, 0.0};
    EXPECT_EQ(f.coeffs, want);
    EXPECT_EQ(extract_data(f, l), data);
    EXPECT_THROW(build_frame(CVec(3), l), std::invalid_argument);
}
