#pragma once

#include <vector>

#include "relfit/linalg.hpp"

namespace fixtures {

/// Three overlapping subsets over the cells F, N, O, FN, FO, NO, FNO.
inline const std::vector<std::vector<long long>> fno_rows{
    {1, 0, 0, 1, 1, 0, 1},
    {0, 1, 0, 1, 0, 1, 1},
    {0, 0, 1, 0, 1, 1, 1},
};

/// Five cells with the overall effect, used for the non-existent MLE example.
inline const std::vector<std::vector<long long>> sparse_rows{
    {1, 1, 1, 0, 1},
    {1, 1, 0, 0, 1},
    {1, 0, 0, 1, 1},
};

/// Same kernel as sparse_rows, hence the same extended model.
inline const std::vector<std::vector<long long>> a1_rows{
    {0, 0, 1, 0, 0},
    {1, 1, 0, 0, 1},
    {1, 0, 0, 1, 1},
};

inline const std::vector<std::vector<long long>> d1_rows{
    {1, 1, 0, -1, 0, 0, 0},
    {1, 0, 1, 0, -1, 0, 0},
    {0, 1, 1, 0, 0, -1, 0},
    {1, 1, 1, 0, 0, 0, -1},
};

inline const std::vector<std::vector<long long>> d2_rows{
    {0, 0, 1, 1, 0, 0, -1},
    {0, 1, 0, 0, 1, 0, -1},
    {1, 0, 0, 0, 0, 1, -1},
    {1, 1, 1, 0, 0, 0, -1},
};

inline relfit::ModelMatrix fno_matrix() { return relfit::validate_model_matrix(fno_rows); }
inline relfit::ModelMatrix sparse_matrix() { return relfit::validate_model_matrix(sparse_rows); }
inline relfit::ModelMatrix a1_matrix() { return relfit::validate_model_matrix(a1_rows); }

inline relfit::RationalMatrix rational_rows(const std::vector<std::vector<long long>>& rows)
{
    relfit::RationalMatrix m;
    for (const auto& r : rows) {
        relfit::RationalVector v;
        for (auto x : r)
            v.emplace_back(x);
        m.append_row(v);
    }
    return m;
}

inline std::vector<std::vector<int>> int_rows(const std::vector<std::vector<long long>>& rows)
{
    std::vector<std::vector<int>> out;
    for (const auto& r : rows)
        out.emplace_back(r.begin(), r.end());
    return out;
}

} // namespace fixtures
