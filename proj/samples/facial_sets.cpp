// Lists every facial set of a model together with its certificate, then shows
// why a kernel basis alone cannot decide membership for boundary points.

#include <cstdio>

#include "relfit/relfit.hpp"

namespace {

void print_vector(const relfit::RationalVector& v)
{
    std::printf("(");
    for (std::size_t k = 0; k < v.size(); ++k)
        std::printf("%s%s", k ? ", " : "", v[k].str().c_str());
    std::printf(")");
}

} // namespace

int main()
{
    using namespace relfit;

    const auto a = validate_model_matrix(std::vector<std::vector<long long>>{
        {1, 0, 0, 1, 1, 0, 1},
        {0, 1, 0, 1, 0, 1, 1},
        {0, 0, 1, 0, 1, 1, 1},
    });

    for (const auto& face : enumerate_facial_sets(a)) {
        std::printf("{");
        for (std::size_t k = 0; k < face.indices.size(); ++k)
            std::printf("%s%zu", k ? "," : "", face.indices[k] + 1);
        std::printf("}  c = ");
        print_vector(face.certificate);
        std::printf("\n");
    }

    const auto d2 = KernelBasis::from_rows(a, RationalMatrix::from_rows({
                                                  {0, 0, 1, 1, 0, 0, -1},
                                                  {0, 1, 0, 0, 1, 0, -1},
                                                  {1, 0, 0, 0, 0, 1, -1},
                                                  {1, 1, 1, 0, 0, 0, -1},
                                              }));
    const auto delta = Distribution::intensity({0, 0, 0, 1, 1, 1, 0});
    std::printf("\ndelta = (0,0,0,1,1,1,0)\n");
    std::printf("cross-product differences vanish under this basis: %s\n",
                dual_report(delta, d2).all_differences_zero(1e-12) ? "yes" : "no");
    std::printf("delta lies in the variety: %s\n", variety_member(delta, a) ? "yes" : "no");
}
