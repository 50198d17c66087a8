#pragma once

#include <stdexcept>
#include <string>

namespace areacfd {

/// Exception carrying a module-qualified error code such as
/// "market.malformed_row" or "posterior.rank_deficient".
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

    /// Module prefix of the code ("market", "posterior", ...).
    std::string module() const { return code_.substr(0, code_.find('.')); }

private:
    std::string code_;
};

}  // namespace areacfd
