#include "mvi/errors.hpp"

namespace mvi {

StageError::StageError(std::string stage, Kind kind, const std::string& what)
    : Error("stage '" + stage + "': " + what), stage_(std::move(stage)), kind_(kind)
{
}

void require(bool condition, const std::string& message)
{
    if (!condition) throw InvalidArgument(message);
}

} // namespace mvi
