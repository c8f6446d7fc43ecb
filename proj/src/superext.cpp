#include "bethe_forge/superext.hpp"

namespace bf {

namespace {

void require_outside(const Twist& tw, IndexSet I, int j, const char* what) {
    if (j < 1 || j > tw.dim()) throw ConfigError(std::string(what) + ": index out of range");
    if (I.contains(j)) throw ConfigError(std::string(what) + ": index must lie outside I");
}

// (xa - xb) Q(u-2) Q_ab - xa Q_b(u-2) Q_a + xb Q_b Q_a(u-2)
TensorOperator qq_shape(const Rat& xa, const Rat& xb, const TensorOperator& q, const TensorOperator& qa,
                        const TensorOperator& qb, const TensorOperator& qab) {
    return op_mul(q.shift(-2), qab) * PolyU(xa - xb) - op_mul(qb.shift(-2), qa) * PolyU(xa) + op_mul(qb, qa.shift(-2)) * PolyU(xb);
}

}  // namespace

TensorOperator check_tq_super(IndexSet I, int idx, int s, const Twist& tw) {
    require_outside(tw, I, idx, "check_tq_super");
    if (!tw.fermionic(idx)) return check_tq(I, idx, s, tw);
    if (s < 0) throw ConfigError("check_tq_super: s must be nonnegative");
    const auto TI = t_series(I, tw, s);
    const auto TIl = t_series(I.with(idx), tw, s);
    const auto us = static_cast<std::size_t>(s);
    TensorOperator r = op_mul(TIl[us], TI[0]) - op_mul(TI[us], TIl[0]);
    if (s >= 1) r += op_mul(TI[us - 1].shift(2), TIl[0].shift(-2)) * PolyU(tw.eigenvalue(idx));
    return r;
}

TensorOperator check_qq_super(IndexSet I, int a, int b, const Twist& tw) {
    require_outside(tw, I, a, "check_qq_super");
    require_outside(tw, I, b, "check_qq_super");
    if (a == b) throw ConfigError("check_qq_super: indices must differ");
    const bool fa = tw.fermionic(a), fb = tw.fermionic(b);
    if (!fa && !fb) return check_qq(I, a, b, tw);
    const Rat& xa = tw.eigenvalue(a);
    const Rat& xb = tw.eigenvalue(b);
    const TensorOperator q = q_operator(I, tw), qa = q_operator(I.with(a), tw), qb = q_operator(I.with(b), tw),
                         qab = q_operator(I.with(a).with(b), tw);
    if (fa && fb)
        // (y_a - y_b) Q_{I,a,b}(u-2) Q_I = y_a Q_{I,a}(u-2) Q_{I,b} - y_b Q_{I,a} Q_{I,b}(u-2)
        return op_mul(qab.shift(-2), q) * PolyU(xa - xb) - op_mul(qa.shift(-2), qb) * PolyU(xa) + op_mul(qa, qb.shift(-2)) * PolyU(xb);
    // (x_i - y_l) Q_{I,l}(u-2) Q_{I,i} = x_i Q_I(u-2) Q_{I,i,l} - y_l Q_I Q_{I,i,l}(u-2)
    const Rat& xi = fa ? xb : xa;
    const Rat& yl = fa ? xa : xb;
    const TensorOperator& qi = fa ? qb : qa;
    const TensorOperator& ql = fa ? qa : qb;
    return op_mul(ql.shift(-2), qi) * PolyU(xi - yl) - op_mul(q.shift(-2), qab) * PolyU(xi) + op_mul(q, qab.shift(-2)) * PolyU(yl);
}

bool outside_fat_hook(const YoungDiagram& lambda, IndexSet I, const Twist& tw) {
    int nb = 0, nf = 0;
    for (int j : I.elements()) (tw.fermionic(j) ? nf : nb) += 1;
    return lambda.row(nb) > nf;
}

bool check_fat_hook(const YoungDiagram& lambda, IndexSet I, const Twist& tw) {
    return t_young(I, lambda, tw).is_zero() == outside_fat_hook(lambda, I, tw);
}

TensorOperator check_bosonization(IndexSet I, int i, int l, const Twist& tw) {
    require_outside(tw, I, i, "check_bosonization");
    require_outside(tw, I, l, "check_bosonization");
    if (tw.fermionic(i) || !tw.fermionic(l)) throw ConfigError("check_bosonization: need a bosonic i and a fermionic l");
    const IndexSet J = I.with(l);
    return qq_shape(tw.eigenvalue(i), tw.eigenvalue(l), q_operator(J, tw), q_operator(J.with(i), tw), q_operator(I, tw),
                    q_operator(I.with(i), tw));
}

std::vector<TensorOperator> gen_series_super(const NestingPath& path, const Twist& tw, int sMax) {
    return gen_series_t(path, tw, sMax);
}

}  // namespace bf
