// A table whose MLE does not exist: the fit lives on the smallest face of the
// marginal cone that contains the data, and the other cells are exact zeros.

#include <cstdio>

#include "relfit/relfit.hpp"

int main()
{
    using namespace relfit;

    const auto a = validate_model_matrix(std::vector<std::vector<long long>>{
        {1, 1, 1, 0, 1},
        {1, 1, 0, 0, 1},
        {1, 0, 0, 1, 1},
    });
    const ObservedTable table({3, 3, 0, 1, 0}, Sampling::multinomial);

    const auto existence = mle_exists(a, table);
    std::printf("MLE exists: %s\n", existence.exists ? "yes" : "no");
    if (existence.minimal_face) {
        std::printf("minimal facial set:");
        for (auto i : existence.minimal_face->indices)
            std::printf(" %zu", i + 1);
        std::printf("\n");
    }

    const auto fit = extended_mle(a, table);
    std::printf("extended MLE:");
    for (double p : fit.delta.values())
        std::printf(" %.6f", p);
    std::printf("\ngamma = %.6f, parameters %s\n", fit.gamma,
                fit.theta ? "factor the fit" : "do not exist under the original matrix");
}
