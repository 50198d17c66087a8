#pragma once

#include "areacfd/elicitation.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>

namespace areacfd::service {

struct StoredProfile {
    elicitation::ElicitationProfile profile;
    std::uint64_t version = 0;
};

/// Directory of canonical profile documents, one `<target>.json` per area.
/// Writes to one target are serialized; the last writer wins and gets the
/// new version number back.
class ProfileStore {
public:
    explicit ProfileStore(std::filesystem::path dir);

    /// Validates, normalizes and persists. Returns the stored form.
    StoredProfile put(const elicitation::ElicitationProfile& profile, std::span<const market::AreaInfo> areas);

    std::optional<StoredProfile> get(const std::string& target) const;

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::mutex& lock_for(const std::string& target) const;
    std::filesystem::path path_for(const std::string& target) const;

    std::filesystem::path dir_;
    mutable std::mutex registry_mutex_;
    mutable std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

}  // namespace areacfd::service
