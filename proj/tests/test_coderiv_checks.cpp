#include "doctest.h"

#include "bethe_forge/coderiv.hpp"
#include "oracles.hpp"

using namespace bf;

namespace {

bool off_poles(const Twist& tw, const std::vector<Rat>& ts) {
    for (const auto& t : ts)
        for (const auto& x : tw.xi)
            if (x * t == 1) return false;
    return true;
}

std::vector<Rat> distinct_rats(SplitMix64& rng, int n) {
    std::vector<Rat> out;
    while (static_cast<int>(out.size()) < n) {
        Rat r = rng.small_rat();
        if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
    }
    return out;
}

// (1 - g t) acting on every site, g diagonal
TensorOperator one_minus_gt(const Twist& tw, const Rat& t) {
    TensorOperator op(tw.dim(), tw.sites());
    for (int r = 0; r < op.size(); ++r) {
        Rat v = 1;
        for (int k : op.tuple(r)) v *= 1 - tw.xi[static_cast<std::size_t>(k)] * t;
        op.at(r, r) = PolyU(v);
    }
    return op;
}

}  // namespace

TEST_CASE("master identity, bosonic") {
    SplitMix64 rng(101);
    Twist one = make_twist(1, 0, {rat(3, 2)}, {rat(1, 3)});
    CHECK(check_master(one, rat(1, 5), rat(2, 7), {}).is_zero());
    for (int draw = 0; draw < 10; ++draw)
        for (auto [K, N] : {std::pair{1, 1}, {2, 1}, {2, 2}, {3, 2}, {2, 3}}) {
            Twist tw = oracle::random_twist(rng, K, 0, N);
            auto zt = distinct_rats(rng, 3);
            if (!off_poles(tw, zt)) continue;
            std::vector<WFactor> extra;
            if (draw % 2) extra.push_back(WFactor{zt[2], 1});
            CHECK(check_master(tw, zt[0], zt[1], extra).is_zero());
        }
}

TEST_CASE("master identity at z = t and with an inverse factor") {
    Twist tw = make_twist(2, 0, {rat(2), rat(-1, 3)}, {rat(0), rat(1, 2)});
    CHECK(check_master(tw, rat(1, 5), rat(1, 5), {}).is_zero());
    CHECK(check_master(tw, rat(1, 5), rat(-2, 7), {WFactor{rat(1, 9), -1}}).is_zero());
}

TEST_CASE("master identity, graded") {
    SplitMix64 rng(102);
    for (int draw = 0; draw < 4; ++draw)
        for (auto [K, M, N] : {std::tuple{1, 1, 1}, {1, 1, 2}, {2, 1, 2}, {1, 2, 2}}) {
            Twist tw = oracle::random_twist(rng, K, M, N);
            auto zt = distinct_rats(rng, 3);
            if (!off_poles(tw, zt)) continue;
            std::vector<WFactor> extra;
            if (draw % 2) extra.push_back(WFactor{zt[2], 1});
            CHECK(check_master(tw, zt[0], zt[1], extra).is_zero());
        }
}

TEST_CASE("Pluecker relation and determinant solution") {
    SplitMix64 rng(103);
    for (int draw = 0; draw < 4; ++draw) {
        Twist tw1 = oracle::random_twist(rng, 2, 0, 1);
        Twist tw2 = oracle::random_twist(rng, 2, 0, 2);
        auto z = distinct_rats(rng, 3);
        if (!off_poles(tw1, z) || !off_poles(tw2, z)) continue;
        CHECK(check_plucker(tw2, z, IndexSet{}, 1, 2).is_zero());
        CHECK(check_plucker(tw2, z, IndexSet{1}, 2, 3).is_zero());
        CHECK(check_master_det(tw1, z, 1).is_zero());
        CHECK(check_master_det(tw1, z, 2).is_zero());
        CHECK(check_master_det(tw2, z, 3).is_zero());
    }
    Twist tw = make_twist(2, 0, {rat(2), rat(3)}, {rat(0)});
    CHECK_THROWS_AS(check_plucker(tw, {rat(1, 5), rat(1, 7)}, IndexSet{1}, 1, 2), ConfigError);
}

TEST_CASE("Bazhanov-Reshetikhin determinant") {
    SplitMix64 rng(104);
    for (int draw = 0; draw < 3; ++draw) {
        CHECK(check_br(YoungDiagram{1, 1}, oracle::random_twist(rng, 2, 0, 1)).is_zero());
        CHECK(check_br(YoungDiagram{2, 1}, oracle::random_twist(rng, 2, 0, 2)).is_zero());
        CHECK(check_br(YoungDiagram{3}, oracle::random_twist(rng, 2, 0, 2)).is_zero());
        CHECK(check_br(YoungDiagram{2, 2}, oracle::random_twist(rng, 3, 0, 2)).is_zero());
    }
    CHECK(check_br(YoungDiagram{}, oracle::random_twist(rng, 2, 0, 1)).is_zero());
}

TEST_CASE("commutativity of co-derivative operators") {
    SplitMix64 rng(105);
    Twist tw = oracle::random_twist(rng, 2, 0, 2);
    // shifting u by 2v turns (u_i + 2D) into (u_i + 2v + 2D)
    auto T = transfer_matrix(YoungDiagram{1}, tw);
    CHECK(op_comm(T, T.shift(rng.small_rat())).is_zero());
    CHECK(check_commutativity({WFactor{rat(1, 5), 1}}, {WFactor{rat(1, 7), 1}}, rng.small_rat(), tw).is_zero());
    for (int draw = 0; draw < 4; ++draw) {
        Twist t1 = oracle::random_twist(rng, 2, 0, 1);
        Twist t3 = oracle::random_twist(rng, 2, 0, 3);
        auto zs = distinct_rats(rng, 3);
        if (!off_poles(t1, zs) || !off_poles(t3, zs)) continue;
        const Rat v = rng.small_rat();
        CHECK(check_commutativity({WFactor{zs[0], 1}}, {WFactor{zs[1], 1}, WFactor{zs[2], -1}}, v, t1).is_zero());
        CHECK(check_commutativity({WFactor{zs[0], 1}, WFactor{zs[1], 1}}, {WFactor{zs[2], 1}}, v, t3).is_zero());
    }
    Twist graded = oracle::random_twist(rng, 1, 1, 2);
    CHECK(check_commutativity({WFactor{rat(1, 5), 1}}, {WFactor{rat(1, 7), 1}}, rat(3, 4), graded).is_zero());
}

TEST_CASE("removal of an eigenvalue") {
    SplitMix64 rng(106);
    const RatMatrix id2{{1, 0}, {0, 1}};
    const RatMatrix om2{{1, 2}, {-1, 3}};
    const RatMatrix om3{{2, 1, 0}, {0, 1, -1}, {1, 0, 1}};
    for (int draw = 0; draw < 3; ++draw) {
        Twist one = oracle::random_twist(rng, 2, 0, 1);
        Twist two = oracle::random_twist(rng, 2, 0, 2);
        Twist three = oracle::random_twist(rng, 3, 0, 2);
        for (int j = 1; j <= 2; ++j) {
            CHECK(check_removal(0, 1, j, one, id2).is_zero());
            CHECK(check_removal(0, 1, j, one, om2).is_zero());
            CHECK(check_removal(1, 1, j, two, id2).is_zero());
            CHECK(check_removal(1, 1, j, two, om2).is_zero());
            CHECK(check_removal(0, 2, j, two, om2).is_zero());
            CHECK(check_removal(1, 1, j, three, om3).is_zero());
        }
    }
    Twist tw = make_twist(2, 0, {rat(2), rat(3)}, {rat(0), rat(1)});
    CHECK_THROWS_AS(check_removal(1, 0, 1, tw, id2), ConfigError);
    CHECK_THROWS_AS(check_removal(0, 2, 1, tw, RatMatrix{{1, 1}, {1, 1}}), ConfigError);
}

TEST_CASE("normalized closed form has simple poles only") {
    SplitMix64 rng(107);
    for (int draw = 0; draw < 5; ++draw) {
        Twist tw = oracle::random_twist(rng, 2, 0, 2);
        Rat t = rng.small_rat();
        if (!off_poles(tw, {t})) continue;
        auto eng = coderivative_apply(WSpec{tw, 2, {WFactor{t, 1}}});
        CHECK(op_mul(one_minus_gt(tw, t), eng) == diagram_oracle_normalized(tw, t));
    }
}

TEST_CASE("co-derivative is linear in the class function") {
    SplitMix64 rng(108);
    Twist tw = oracle::random_twist(rng, 2, 0, 2);
    const Rat a = rat(3, 5), b = rat(-7, 2), t1 = rat(1, 11), t2 = rat(-1, 13);
    JetFunction f = [&](const JetMatrix& G, const std::vector<int>&) {
        NilJet w1 = jet_w(G, tw, t1, 0, 1, 0, 0).at(0);
        NilJet w2 = jet_w(G, tw, t2, 0, 1, 0, 0).at(0);
        return std::vector<NilJet>{a * w1 + b * w2};
    };
    auto combo = coderivative_rows(tw, 1, 1, f).front();
    auto lhs = coderivative_apply(WSpec{tw, 1, {WFactor{t1, 1}}}) * PolyU(a) +
               coderivative_apply(WSpec{tw, 1, {WFactor{t2, 1}}}) * PolyU(b);
    CHECK(combo == lhs);
}

TEST_CASE("Leibniz rule at one site") {
    SplitMix64 rng(109);
    for (auto [K, M] : {std::pair{2, 0}, {3, 0}, {1, 1}}) {
        Twist tw = oracle::random_twist(rng, K, M, 1);
        auto ts = distinct_rats(rng, 2);
        if (!off_poles(tw, ts)) continue;
        const IndexSet all = IndexSet::full(tw.dim());
        const Rat p1 = gen_w(ts[0], tw, all), p2 = gen_w(ts[1], tw, all);
        // A_X = u X(g) + 2 D X, so A_{XY} = Y(g) A_X + X(g) A_Y - u X(g) Y(g)
        auto a1 = coderivative_apply(WSpec{tw, 0, {WFactor{ts[0], 1}}});
        auto a2 = coderivative_apply(WSpec{tw, 0, {WFactor{ts[1], 1}}});
        auto a12 = coderivative_apply(WSpec{tw, 0, {WFactor{ts[0], 1}, WFactor{ts[1], 1}}});
        auto u = TensorOperator::identity(tw.dim(), 1, PolyU::linear(-tw.theta[0], 1));
        CHECK(a12 == a1 * PolyU(p2) + a2 * PolyU(p1) - u * PolyU(p1 * p2));
    }
}

TEST_CASE("every co-derivative output conserves weight") {
    SplitMix64 rng(110);
    Twist tw = oracle::random_twist(rng, 2, 1, 2);
    CHECK(coderivative_apply(WSpec{tw, 0, {WFactor{rat(1, 17), 1}, WFactor{rat(-1, 19), -1}}}).respects_sectors());
    for (const auto& T : transfer_series(tw, 3)) CHECK(T.respects_sectors());
}
