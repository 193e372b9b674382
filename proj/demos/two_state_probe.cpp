// Two-state benchmark: bounds on h', simulation probe of the original and
// transformed systems, and equivalence of their trajectories.
#include <cstdio>

#include "delaywarp/delaywarp.hpp"

using namespace delaywarp;

int main() {
    const Matrix A0 = gu_A0();
    const Matrix A1 = gu_A1();

    for (double eps : {0.01, 0.1}) {
        const auto delay = PeriodicDelay::sinusoid(3.0, 5.0, eps);
        const auto tt = SeriesTransform::build(delay, 3.0, 2);
        const auto b = compute_hdot_bounds(tt, 0.0, 3.0);
        std::printf("eps = %g\n", eps);
        std::printf("  h' in [%.6f, %.6f], h_bar = %.6f, gamma = %.6f\n", b.h_l, b.h_u, b.h_bar, b.gamma);

        const auto orig = stability_probe(A0, A1, delay, 200.0);
        const auto trans = stability_probe(A0, A1, tt, 3.0, 200.0);
        std::printf("  probe original: %s (late/early %.2e)\n", to_string(orig.verdict), orig.ratio);
        std::printf("  probe order 2:  %s (late/early %.2e)\n", to_string(trans.verdict), trans.ratio);

        const auto ex = build_exact_transform(delay, 3.0, 30.0);
        const auto rep = verify_equivalence(DdeSystem(A0, A1), delay, ex, 30.0, 0.0297);
        std::printf("  equivalence sup |x(h(l)) - x_bar(l)| = %.2e\n", rep.sup);
    }
    return 0;
}
