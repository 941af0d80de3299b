#include "strassen/flow.hpp"

namespace strassen {

template class MaxFlow<double>;
template class MaxFlow<std::int64_t>;
template class MinCostFlow<double>;
template class MinCostFlow<std::int64_t>;

}  // namespace strassen
