// Prints h' of the first-, second-order and propagated transforms for
// tau(t) = 3 + eps sin(5 t), plus the Abel residual of each.
#include <cstdio>
#include <cstdlib>

#include "delaywarp/delaywarp.hpp"

using namespace delaywarp;

int main(int argc, char** argv) {
    const double eps = argc > 1 ? std::atof(argv[1]) : 0.05;
    const auto delay = PeriodicDelay::sinusoid(3.0, 5.0, eps);

    const auto report = validate_hypotheses(delay);
    if (!report.ok()) {
        std::fprintf(stderr, "hypotheses fail for eps = %g\n", eps);
        return 1;
    }

    const auto o1 = SeriesTransform::build(delay, 3.0, 1);
    const auto o2 = SeriesTransform::build(delay, 3.0, 2);
    const auto ex = build_exact_transform(delay, 3.0, 30.0);

    std::printf("%8s %12s %12s %12s\n", "lambda", "order1", "order2", "exact");
    for (double l : linspace(0.0, 3.0, 13)) {
        std::printf("%8.3f %12.8f %12.8f %12.8f\n", l, o1.h_dot(l), o2.h_dot(l), ex.h_dot(l));
    }

    const auto grid = linspace(0.0, 30.0, 3001);
    std::printf("\nsup Abel residual on [0, 30]\n");
    std::printf("  order 1   %.3e\n", abel_residual(o1, delay, 3.0, grid).sup);
    std::printf("  order 2   %.3e\n", abel_residual(o2, delay, 3.0, grid).sup);
    std::printf("  exact     %.3e\n", abel_residual(ex, delay, 3.0, grid).sup);
    return 0;
}
