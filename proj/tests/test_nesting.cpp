#include "doctest.h"

#include <algorithm>

#include "bethe_forge/nesting.hpp"
#include "oracles.hpp"

using namespace bf;

namespace {

TensorOperator diag_op(int d, int n, const std::vector<PolyU>& entries) {
    TensorOperator op(d, n);
    for (int r = 0; r < op.size(); ++r) op.at(r, r) = entries[static_cast<std::size_t>(r)];
    return op;
}

std::vector<IndexSet> all_subsets(int n) {
    std::vector<IndexSet> out;
    for (std::uint32_t m = 0; m < (1u << n); ++m) out.emplace_back(m);
    return out;
}

// 2^N times the number of permutations fixing the index word
Rat stabilizer_count(const std::vector<int>& word) {
    std::vector<int> counts(8, 0);
    for (int k : word) ++counts[static_cast<std::size_t>(k)];
    Rat v = 1;
    for (int c : counts)
        for (int f = 2; f <= c; ++f) v *= f;
    for (std::size_t i = 0; i < word.size(); ++i) v *= 2;
    return v;
}

}  // namespace

TEST_CASE("normalizer expansions") {
    Twist tw = make_twist(2, 0, {rat(2), rat(3)}, {rat(0)});
    auto B = normalizer(IndexSet{1}, tw);
    REQUIRE(B.size() == 1);
    CHECK(B[0].j == 2);
    // (-3 eps) (diag(1/3, 0) - diag(2, 3) eps)
    CHECK(B[0].diagonal[0] == PolyU::linear(0, -3) * PolyU::linear(rat(1, 3), -2));
    CHECK(B[0].diagonal[1] == PolyU::linear(0, -3) * PolyU::linear(0, -3));
    CHECK(normalizer(IndexSet::full(2), tw).empty());
    CHECK(nesting_shift(IndexSet{}, tw) == 4);
    Twist sup = make_twist(1, 2, {rat(2), rat(3), rat(5)}, {rat(0)});
    CHECK(nesting_shift(IndexSet{}, sup) == -2);
    CHECK(nesting_shift(IndexSet{2}, sup) == 0);
}

TEST_CASE("Q-operator spot values") {
    Twist tw = make_twist(2, 0, {rat(2), rat(3)}, {rat(0)});
    CHECK(q_operator(IndexSet{1}, tw) == diag_op(2, 1, {PolyU::linear(6, 1), PolyU(6)}));
    CHECK(q_operator(IndexSet::full(2), tw) == TensorOperator::identity(2, 1, PolyU::u()));
    // QQ with the two one-spin operators fixes Q_empty = diag(2 x_1/(x_1 - x_2), 2 x_2/(x_2 - x_1))
    CHECK(q_operator(IndexSet{}, tw) == diag_op(2, 1, {PolyU(-4), PolyU(6)}));
}

TEST_CASE("level-one Q agrees with the permutation-sum oracle") {
    SplitMix64 rng(209);
    for (auto [K, N] : {std::pair{2, 1}, {2, 2}, {3, 2}, {2, 3}}) {
        Twist tw = oracle::random_twist(rng, K, 0, N);
        for (int j = 1; j <= K; ++j)
            CHECK(q_operator(IndexSet::full(K).without(j), tw) == oracle::level_one_q(tw, j));
    }
}

TEST_CASE("Q_empty agrees with QQ built from oracle level-one Q") {
    SplitMix64 rng(210);
    for (int N = 1; N <= 3; ++N) {
        Twist tw = oracle::random_twist(rng, 2, 0, N);
        CHECK(q_operator(IndexSet{}, tw) == oracle::q_empty_from_qq(tw));
    }
    Twist two = make_twist(2, 0, {rat(2), rat(3)}, {rat(0), rat(1, 2)});
    CHECK(q_operator(IndexSet{}, two) == oracle::q_empty_from_qq(two));
}

TEST_CASE("Q_empty counts index-word stabilizers where no index is missing or repeated") {
    SplitMix64 rng(201);
    for (auto [K, N] : {std::pair{1, 1}, {1, 3}, {2, 2}, {3, 3}}) {
        Twist tw = oracle::random_twist(rng, K, 0, N);
        TensorOperator q = q_operator(IndexSet{}, tw);
        for (int r = 0; r < q.size(); ++r) {
            auto word = q.tuple(r);
            std::vector<int> sorted = word;
            std::sort(sorted.begin(), sorted.end());
            const bool covering = K == 1 || std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
            if (covering) CHECK(q.at(r, r) == PolyU(stabilizer_count(word)));
        }
    }
}

TEST_CASE("Q of the full set is phi times identity") {
    SplitMix64 rng(202);
    for (auto [K, M, N] : {std::tuple{2, 0, 2}, {3, 0, 2}, {1, 1, 2}, {2, 2, 1}}) {
        Twist tw = oracle::random_twist(rng, K, M, N);
        CHECK(q_operator(IndexSet::full(K + M), tw) == TensorOperator::identity(K + M, N, phi_poly(tw)));
    }
}

TEST_CASE("limit order does not matter") {
    SplitMix64 rng(203);
    for (int draw = 0; draw < 3; ++draw)
        for (auto [K, N] : {std::pair{2, 2}, {3, 1}, {3, 2}}) {
            Twist tw = oracle::random_twist(rng, K, 0, N);
            for (IndexSet I : all_subsets(K))
                CHECK(q_operator(I, tw, LimitOrder::Ascending) == q_operator(I, tw, LimitOrder::Descending));
        }
}

TEST_CASE("symmetric T-operators") {
    SplitMix64 rng(204);
    Twist tw = oracle::random_twist(rng, 2, 0, 2);
    CHECK(t_sym(IndexSet::full(2), 1, tw) == transfer_matrix(YoungDiagram{1}, tw));
    CHECK(t_sym(IndexSet::full(2), 2, tw) == transfer_matrix(YoungDiagram{2}, tw));
    for (int draw = 0; draw < 10; ++draw) {
        Twist t3 = oracle::random_twist(rng, 3, 0, 1 + draw % 2);
        IndexSet I(static_cast<std::uint32_t>(rng.next() % 8));
        CHECK(t_sym(I, 0, t3) == q_operator(I, t3));
    }
    CHECK(t_sym(IndexSet{1}, -1, tw).is_zero());
}

TEST_CASE("one-spin level-one T from the TQ relation") {
    // T_1^1 Q_12 = T_12^1 Q_1 - x_2 T_12^0(u+2) Q_1(u-2), solved for T_1^1 from level-zero data
    Twist tw = make_twist(2, 0, {rat(2), rat(3)}, {rat(0)});
    const IndexSet full = IndexSet::full(2), one{1};
    TensorOperator lhs = op_mul(transfer_matrix(YoungDiagram{1}, tw), q_operator(one, tw)) -
                         op_mul(q_operator(full, tw).shift(2), q_operator(one, tw).shift(-2)) * PolyU(3);
    CHECK(op_left_divide(q_operator(full, tw), lhs) == t_sym(one, 1, tw));
}

// Level-one T from the simple-pole expansion of
// (1 - g t)^{(x) N} [(x)(u_i + 2 + 2D) (t chi_s(g) - chi_{s-1}(g)) w(t)]:
// (1 - x_j t) times it tends to T_{jbar}^s / x_j at t = 1/x_j.
namespace {
TensorOperator pole_sum_t(const Twist& tw, int j, int s) {
    const int n = tw.sites();
    const int lo = -(n + 1), hi = n + 1;
    const Rat xj = tw.eigenvalue(j);
    JetFunction f = [&](const JetMatrix& G, const std::vector<int>& row) {
        const JetShape sh = G[0][0].shape();
        LJet chi = jet_w(G, tw, Rat(0), Rat(1), 1, 0, s);
        LJet w = jet_w(G, tw, 1 / xj, Rat(1), 1, lo, hi);
        LJet bracket(lo, hi, NilJet(sh));
        // t chi_s - chi_{s-1} with t = 1/x_j + eps
        bracket.at(0) = (1 / xj) * chi.at(s) - (s >= 1 ? chi.at(s - 1) : NilJet(sh));
        bracket.at(1) = chi.at(s);
        const PolyU b = normalizer_row(tw, j, row);
        LJet bj(lo, hi, NilJet(sh));
        for (int k = 0; k <= b.degree(); ++k) bj.at(k) = NilJet::scalar(sh, b.coeff(k));
        return std::vector<NilJet>{xj * laurent_limit(bj * bracket * w)};
    };
    return coderivative_rows(tw, 2, 1, f).front();
}
}  // namespace

TEST_CASE("level-one T agrees with the pole-sum definition") {
    SplitMix64 rng(205);
    for (auto [K, N] : {std::pair{2, 1}, {2, 2}, {3, 2}}) {
        Twist tw = oracle::random_twist(rng, K, 0, N);
        for (int j = 1; j <= K; ++j)
            for (int s = 0; s <= 2; ++s) CHECK(pole_sum_t(tw, j, s) == t_sym(IndexSet::full(K).without(j), s, tw));
    }
}

TEST_CASE("nested Young T-operators") {
    SplitMix64 rng(206);
    Twist tw = oracle::random_twist(rng, 2, 0, 1);
    CHECK(t_young(IndexSet{1}, YoungDiagram{}, tw) == q_operator(IndexSet{1}, tw));
    CHECK(t_young(IndexSet{1}, YoungDiagram{1, 1}, tw).is_zero());
    CHECK(t_young(IndexSet::full(2), YoungDiagram{1, 1}, tw) == transfer_matrix(YoungDiagram{1, 1}, tw));
    Twist t3 = oracle::random_twist(rng, 3, 0, 2);
    CHECK(t_young(IndexSet::full(3), YoungDiagram{2, 1}, t3) == transfer_matrix(YoungDiagram{2, 1}, t3));
    CHECK(t_young(IndexSet{1, 3}, YoungDiagram{1, 1, 1}, t3).is_zero());
    CHECK_FALSE(t_young(IndexSet{1, 3}, YoungDiagram{2, 1}, t3).is_zero());
}

TEST_CASE("TQ relations") {
    SplitMix64 rng(207);
    Twist two = make_twist(2, 0, {rat(2), rat(3)}, {rat(0)});
    CHECK(check_tq(IndexSet{}, 1, 1, two).is_zero());
    for (int draw = 0; draw < 3; ++draw) {
        Twist tw = oracle::random_twist(rng, 3, 0, 2);
        for (IndexSet I : all_subsets(3))
            for (int j = 1; j <= 3; ++j) {
                if (I.contains(j)) continue;
                for (int s = 0; s <= 2; ++s) CHECK(check_tq(I, j, s, tw).is_zero());
            }
    }
}

TEST_CASE("QQ relations") {
    SplitMix64 rng(208);
    Twist two = make_twist(2, 0, {rat(2), rat(3)}, {rat(0)});
    CHECK(check_qq(IndexSet{}, 1, 2, two).is_zero());
    for (int draw = 0; draw < 3; ++draw) {
        Twist tw = oracle::random_twist(rng, 3, 0, 2);
        CHECK(check_qq(IndexSet{3}, 1, 2, tw).is_zero());
        CHECK(check_qq(IndexSet{}, 1, 3, tw).is_zero());
        CHECK(check_qq(IndexSet{}, 1, 3, tw) + check_qq(IndexSet{}, 3, 1, tw) == TensorOperator(3, 2));
    }
}

TEST_CASE("Hirota relation on every level") {
    SplitMix64 rng(211);
    Twist two = oracle::random_twist(rng, 2, 0, 1);
    CHECK(check_hirota(IndexSet::full(2), 1, 1, two).is_zero());
    CHECK(check_hirota(IndexSet{1}, 1, 1, two).is_zero());
    Twist tw = oracle::random_twist(rng, 3, 0, 2);
    for (IndexSet I : all_subsets(3))
        for (int a = 1; a <= 2; ++a)
            for (int s = 1; s <= 2; ++s) CHECK(check_hirota(I, a, s, tw).is_zero());
    CHECK_THROWS_AS(check_hirota(IndexSet{1}, 0, 1, tw), ConfigError);
}

TEST_CASE("bilinear Baecklund relations") {
    SplitMix64 rng(212);
    Twist tw = oracle::random_twist(rng, 3, 0, 2);
    for (IndexSet I : all_subsets(3))
        for (int j = 1; j <= 3; ++j) {
            if (I.contains(j)) continue;
            for (int a = 0; a <= 2; ++a)
                for (int s = 0; s <= 2; ++s) {
                    auto [r1, r2] = check_bt(I, j, a, s, tw);
                    CHECK(r1.is_zero());
                    CHECK(r2.is_zero());
                }
        }
}

TEST_CASE("second bilinear relation at a = 0 is the TQ relation") {
    SplitMix64 rng(213);
    Twist tw = oracle::random_twist(rng, 3, 0, 2);
    for (IndexSet I : all_subsets(3))
        for (int j = 1; j <= 3; ++j) {
            if (I.contains(j)) continue;
            for (int s = 0; s <= 2; ++s) {
                // T_{Ij}^{s+1} Q_I - Q_{Ij} T_I^{s+1} = x_j T_{Ij}^{s}(u+2) Q_I(u-2) read at s -> s+1
                auto r2 = check_bt(I, j, 0, s, tw).second;
                CHECK(r2 == check_tq(I, j, s + 1, tw) * PolyU(-1));
            }
        }
}

TEST_CASE("Wronskian reconstruction of Q-operators") {
    SplitMix64 rng(214);
    Twist one = oracle::random_twist(rng, 2, 0, 1);
    CHECK(wronskian_q(IndexSet{}, IndexSet::full(2), one) == TensorOperator::identity(2, 1, phi_poly(one)));
    Twist tw = oracle::random_twist(rng, 3, 0, 2);
    CHECK(wronskian_q(IndexSet{}, IndexSet::full(3), tw) == q_operator(IndexSet::full(3), tw));
    for (IndexSet I : all_subsets(3))
        for (IndexSet J : all_subsets(3))
            if ((I.mask() & J.mask()) == 0) CHECK(wronskian_q(I, J, tw) == q_operator(IndexSet(I.mask() | J.mask()), tw));
    CHECK_THROWS_AS(wronskian_q(IndexSet{1}, IndexSet{1, 2}, tw), ConfigError);
}

TEST_CASE("generating series along nesting paths") {
    SplitMix64 rng(215);
    Twist one = oracle::random_twist(rng, 2, 0, 1);
    auto a = gen_series_t(NestingPath::from_order({1, 2}), one, 2);
    CHECK(a[0] == q_operator(IndexSet::full(2), one));
    CHECK(a[1] == transfer_matrix(YoungDiagram{1}, one));
    CHECK(a == gen_series_t(NestingPath::from_order({2, 1}), one, 2));
    Twist tw = oracle::random_twist(rng, 3, 0, 2);
    auto b = gen_series_t(NestingPath::from_order({1, 2, 3}), tw, 3);
    CHECK(b == gen_series_t(NestingPath::from_order({3, 1, 2}), tw, 3));
    for (int s = 0; s <= 3; ++s) CHECK(b[static_cast<std::size_t>(s)] == t_sym(IndexSet::full(3), s, tw));
}

TEST_CASE("Hasse diagram export") {
    auto count = [](const std::string& dot, const std::string& needle) {
        std::size_t n = 0;
        for (auto p = dot.find(needle); p != std::string::npos; p = dot.find(needle, p + 1)) ++n;
        return n;
    };
    const std::string k3 = hasse_export(3, 0);
    CHECK(count(k3, "label=") == 8);
    CHECK(count(k3, " -- ") == 12);
    CHECK(count(hasse_export(4, 0), "label=") == 16);
    const std::string k22 = hasse_export(2, 2);
    CHECK(count(k22, "label=") == 16);
    CHECK(count(k22, "style=solid") == 16);
    CHECK(count(k22, "style=dashed") == 16);
    NestingPath path = NestingPath::from_order({2, 3, 1, 4});
    CHECK(count(hasse_export(4, 0, &path), "penwidth=3") == 4);
    CHECK(hasse_export(3, 0) == k3);
    CHECK_THROWS_AS(hasse_export(4, 3), ConfigError);
}

TEST_CASE("degree law and spectator independence") {
    SplitMix64 rng(216);
    for (auto [K, M, N] : {std::tuple{2, 0, 2}, {3, 0, 2}, {2, 0, 3}, {1, 1, 2}, {2, 1, 1}}) {
        Twist tw = oracle::random_twist(rng, K, M, N);
        for (IndexSet I : all_subsets(K + M)) {
            TensorOperator q = q_operator(I, tw);
            CHECK(q.respects_sectors());
            for (int r = 0; r < q.size(); ++r) {
                int inside = 0;
                for (int k : q.tuple(r)) inside += I.contains(k + 1) ? 1 : 0;
                CHECK(q.at(r, r).degree() == inside);
                for (int c = 0; c < q.size(); ++c) CHECK(q.at(r, c).degree() <= inside);
            }
            for (int n = 0; n < N; ++n) {
                Twist moved = tw;
                moved.theta[static_cast<std::size_t>(n)] += rat(5, 7);
                TensorOperator qm = q_operator(I, moved);
                for (int r = 0; r < q.size(); ++r)
                    if (!I.contains(q.tuple(r)[static_cast<std::size_t>(n)] + 1))
                        for (int c = 0; c < q.size(); ++c) CHECK(qm.at(r, c) == q.at(r, c));
            }
        }
    }
}

TEST_CASE("commuting family across nesting levels") {
    SplitMix64 rng(217);
    Twist tw = oracle::random_twist(rng, 2, 0, 2);
    std::vector<TensorOperator> family;
    for (IndexSet I : all_subsets(2))
        for (int s = 0; s <= 2; ++s) family.push_back(t_sym(I, s, tw));
    const Rat v = rng.small_rat();
    for (const auto& a : family)
        for (const auto& b : family) CHECK(op_comm(a, b.shift(v)).is_zero());
}
