// Fits the same 2x2x2 attendance table under both sampling schemes.
// The model has no overall effect, so the multinomial fit needs gamma != 1.

#include <cstdio>

#include "relfit/relfit.hpp"

int main()
{
    using namespace relfit;

    const auto a = validate_model_matrix(std::vector<std::vector<long long>>{
        {1, 0, 0, 1, 1, 0, 1},
        {0, 1, 0, 1, 0, 1, 1},
        {0, 0, 1, 0, 1, 1, 1},
    });
    const std::vector<std::uint64_t> counts{10, 14, 25, 5, 3, 16, 27};
    const char* labels[] = {"F", "N", "O", "FN", "FO", "NO", "FNO"};

    const auto multinomial = extended_mle(a, ObservedTable(counts, Sampling::multinomial));
    const auto poisson = extended_mle(a, ObservedTable(counts, Sampling::poisson));

    std::printf("%-4s %8s %14s %12s\n", "cell", "observed", "multinomial%", "poisson");
    double total = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        std::printf("%-4s %8llu %14.2f %12.2f\n", labels[i], static_cast<unsigned long long>(counts[i]),
                    100 * multinomial.delta[i], poisson.delta[i]);
        total += poisson.delta[i];
    }
    std::printf("gamma (multinomial) = %.6f\n", multinomial.gamma);
    std::printf("total Poisson intensity = %.2f of %llu observed\n", total,
                static_cast<unsigned long long>(ObservedTable(counts, Sampling::poisson).total()));
}
