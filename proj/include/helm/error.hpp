#pragma once

#include <stdexcept>
#include <string>

namespace helm {

/// Base for every error raised by the engine. `kind()` is a stable tag
/// used by the CLI and in reports.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define HELM_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(#Name, what) {}       \
    }

// netmodel
HELM_DEFINE_ERROR(SchemaError);
HELM_DEFINE_ERROR(ValidationError);
HELM_DEFINE_ERROR(UnknownFixture);
// series
HELM_DEFINE_ERROR(SingularEmbedding);
HELM_DEFINE_ERROR(PrecisionExhausted);
// pade
HELM_DEFINE_ERROR(DegenerateTable);
HELM_DEFINE_ERROR(PoleAtPoint);
HELM_DEFINE_ERROR(RootFindingStalled);
// newton
HELM_DEFINE_ERROR(SingularJacobian);
HELM_DEFINE_ERROR(DivisionByZeroVm);
HELM_DEFINE_ERROR(SingularAugmented);
// stability
HELM_DEFINE_ERROR(BadBracket);

#undef HELM_DEFINE_ERROR

}  // namespace helm
