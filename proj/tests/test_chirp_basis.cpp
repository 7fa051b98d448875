// SPDX-License-Identifier: Apache-2.0
#include "mcdm/chirp_basis.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mcdm;

namespace {

CVec random_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CVec v(n);
    for (auto& x : v) x = {g(rng), g(rng)};
    return v;
}

double max_abs_diff(const CVec& a, const CVec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double norm2(const CVec& v) {
    double s = 0.0;
    for (auto x : v) s += std::norm(x);
    return std::sqrt(s);
}

}  // namespace

TEST(WaveformParams, DerivedQuantities) {
    WaveformParams p(1024, 488.0, 2.38e5);
    EXPECT_DOUBLE_EQ(p.sample_rate(), 1024 * 488.0);
    EXPECT_EQ(p.samples_per_symbol(), 1024u);
    EXPECT_DOUBLE_EQ(p.spacing_hz() * p.symbol_duration(), 1.0);
    EXPECT_NEAR(p.chirp_span_hz(), 2.38e5 / 488.0, 1e-9);
    EXPECT_EQ(p.without_chirp().chirp_rate(), 0.0);
}

TEST(WaveformParams, RejectsInvalid) {
    EXPECT_THROW(WaveformParams(1, 488.0, 0.0), std::invalid_argument);
    EXPECT_THROW(WaveformParams(8, 0.0, 0.0), std::invalid_argument);
    EXPECT_THROW(WaveformParams(8, -1.0, 0.0), std::invalid_argument);
}

TEST(MakeBasis, UnchirpedColumnsAreDftColumns) {
    const ChirpBasis b = make_basis(WaveformParams(4, 1.0, 0.0));
    const CVec psi0 = b.subcarrier(0);
    const CVec psi1 = b.subcarrier(1);
    const CVec want0{0.5, 0.5, 0.5, 0.5};
    const CVec want1{{0.5, 0}, {0, 0.5}, {-0.5, 0}, {0, -0.5}};
    EXPECT_LT(max_abs_diff(psi0, want0), 1e-15);
    EXPECT_LT(max_abs_diff(psi1, want1), 1e-15);
}

TEST(MakeBasis, ChirpedSampleMatchesScalarEvaluation) {
    // K=4, delta_f=1 Hz, mu=2 Hz/s, f_s=4 Hz: psi_0[1] = 0.5 exp(j 0.125 pi).
    const ChirpBasis b = make_basis(WaveformParams(4, 1.0, 2.0));
    const cf64 want = 0.5 * std::polar(1.0, 0.125 * oracle::kPi);
    EXPECT_LT(std::abs(b.subcarrier(0)[1] - want), 1e-15);
    EXPECT_LT(std::abs(b.subcarrier(0)[1] - oracle::chirp_sample(0, 1, 4, 1.0, 2.0)), 1e-15);
}

TEST(MakeBasis, EverySampleMatchesDefinition) {
    for (double mu : {0.0, 2.38e5, -2.38e5}) {
        const ChirpBasis b(WaveformParams(64, 488.0, mu));
        for (std::size_t k = 0; k < 64; ++k) {
            const CVec psi = b.subcarrier(k);
            for (std::size_t n = 0; n < 64; ++n) {
                ASSERT_NEAR(std::abs(psi[n]), 0.125, 1e-15);
                ASSERT_LT(std::abs(psi[n] - oracle::chirp_sample(k, n, 64, 488.0, mu)), 1e-12);
            }
        }
        for (const cf64& d : b.dechirp()) EXPECT_NEAR(std::abs(d), 0.125, 1e-15);
    }
}

TEST(CrossCorrelation, OrthonormalAcrossSizesAndRates) {
    for (std::size_t K : {4u, 64u, 1024u}) {
        for (double mu : {0.0, 2.38e5, -2.38e5}) {
            const ChirpBasis b(WaveformParams(K, 488.0, mu));
            // Sampled pairs at K=1024; the full Gram matrix is in the acceptance suite.
            const std::size_t stride = K > 64 ? 97 : 1;
            for (std::size_t m = 0; m < K; m += stride) {
                for (std::size_t n = 0; n < K; n += stride) {
                    const cf64 rho = cross_correlation(b, m, n);
                    if (m == n) ASSERT_LT(std::abs(rho - 1.0), 1e-12) << K << " " << mu << " " << m;
                    else ASSERT_LT(std::abs(rho), 1e-10) << K << " " << mu << " " << m << "," << n;
                }
            }
        }
    }
}

TEST(CrossCorrelation, SpecificPairs) {
    const ChirpBasis b(WaveformParams(1024, 488.0, 2.38e5));
    EXPECT_LT(std::abs(cross_correlation(b, 1, 2)), 1e-10);
    EXPECT_LT(std::abs(cross_correlation(b, 7, 7) - 1.0), 1e-12);
    const ChirpBasis flat(WaveformParams(16, 488.0, 0.0));
    EXPECT_NEAR(cross_correlation(flat, 0, 0).real(), 1.0, 1e-15);
    EXPECT_THROW(cross_correlation(flat, 16, 0), std::out_of_range);
}

TEST(OctForward, BasisVectorGivesIndicator) {
    for (double mu : {0.0, 1.7e5, -3e5}) {
        const ChirpBasis b(WaveformParams(8, 488.0, mu));
        const Spectrum s = oct_forward(b, b.subcarrier(3));
        for (std::size_t k = 0; k < 8; ++k) {
            if (k == 3) EXPECT_LT(std::abs(s[k] - 1.0), 1e-12);
            else EXPECT_LT(std::abs(s[k]), 1e-10);
        }
    }
}

TEST(OctForward, ZeroInZeroOut) {
    const ChirpBasis b(WaveformParams(8, 488.0, 2.38e5));
    const Spectrum s = oct_forward(b, CVec(8));
    for (auto c : s.coeffs) EXPECT_EQ(c, cf64{});
}

TEST(OctForward, DftCase) {
    const ChirpBasis b(WaveformParams(4, 1.0, 0.0));
    const CVec x{{0.5, 0}, {0, 0.5}, {-0.5, 0}, {0, -0.5}};
    const Spectrum s = oct_forward(b, x);
    EXPECT_LT(max_abs_diff(s.coeffs, CVec{0, 1, 0, 0}), 1e-15);
}

TEST(OctForward, LengthMismatchThrows) {
    const ChirpBasis b(WaveformParams(8, 488.0, 0.0));
    EXPECT_THROW(oct_forward(b, CVec(7)), std::invalid_argument);
    EXPECT_THROW(ioct_inverse(b, Spectrum{CVec(9)}), std::invalid_argument);
}

TEST(IoctInverse, IndicatorGivesBasisVector) {
    const ChirpBasis b(WaveformParams(16, 488.0, 2.38e5));
    Spectrum s{CVec(16)};
    s[5] = 1.0;
    EXPECT_LT(max_abs_diff(ioct_inverse(b, s), b.subcarrier(5)), 1e-15);
}

TEST(IoctInverse, AllOnesSpectrumMatchesDirectSum) {
    const ChirpBasis b(WaveformParams(4, 1.0, 0.0));
    const CVec x = ioct_inverse(b, Spectrum{CVec(4, 1.0)});
    CVec want(4);
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t n = 0; n < 4; ++n) want[n] += oracle::chirp_sample(k, n, 4, 1.0, 0.0);
    EXPECT_LT(max_abs_diff(x, want), 1e-15);
    EXPECT_LT(max_abs_diff(x, CVec{2, 0, 0, 0}), 1e-15);
}

// Property: round trip, unitarity and factorization on random vectors.
TEST(OctProperties, RoundTripUnitarityFactorization) {
    std::mt19937_64 rng(11);
    for (std::size_t K : {4u, 16u, 64u}) {
        for (double mu : {0.0, 2.38e5, -2.38e5, 9.1e4}) {
            const ChirpBasis b(WaveformParams(K, 488.0, mu));
            for (int rep = 0; rep < 20; ++rep) {
                const CVec x = random_vector(K, rng);
                const Spectrum X = oct_forward(b, x);
                EXPECT_LT(max_abs_diff(ioct_inverse(b, X), x), 1e-9);
                EXPECT_NEAR(norm2(X.coeffs), norm2(x), 1e-10 * norm2(x));
                EXPECT_LT(max_abs_diff(X.coeffs, oracle::direct_oct(x, 488.0, mu)), 1e-9);
                const Spectrum Y{random_vector(K, rng)};
                EXPECT_LT(max_abs_diff(oct_forward(b, ioct_inverse(b, Y)).coeffs, Y.coeffs), 1e-9);
            }
        }
    }
}

TEST(OctProperties, ZeroRateIsUnitaryDft) {
    std::mt19937_64 rng(5);
    for (std::size_t K : {8u, 64u, 12u}) {
        const ChirpBasis b(WaveformParams(K, 488.0, 0.0));
        const CVec x = random_vector(K, rng);
        EXPECT_LT(max_abs_diff(oct_forward(b, x).coeffs, oracle::unitary_dft(x)), 1e-12);
    }
}

TEST(ChirpBasis, DechirpAtExtendsTheGrid) {
    const ChirpBasis b(WaveformParams(32, 488.0, 2.38e5));
    for (long n = 0; n < 32; ++n) EXPECT_EQ(b.dechirp_at(n), b.dechirp()[static_cast<std::size_t>(n)]);
    // The quadratic phase is symmetric about t = 0.
    EXPECT_LT(std::abs(b.dechirp_at(-5) - b.dechirp_at(5)), 1e-15);
}
