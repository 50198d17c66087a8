#include "areacfd/service/profile_store.hpp"

#include "areacfd/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>

namespace areacfd::service {

namespace fs = std::filesystem;

ProfileStore::ProfileStore(fs::path dir) : dir_(std::move(dir)) {}

std::mutex& ProfileStore::lock_for(const std::string& target) const {
    std::lock_guard guard(registry_mutex_);
    auto& slot = locks_[target];
    if (!slot) {
        slot = std::make_unique<std::mutex>();
    }
    return *slot;
}

fs::path ProfileStore::path_for(const std::string& target) const {
    const bool safe = !target.empty() && std::all_of(target.begin(), target.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    });
    if (!safe) {
        throw Error("elicitation.unknown_area", fmt::format("invalid area code '{}'", target));
    }
    return dir_ / (target + ".json");
}

std::optional<StoredProfile> ProfileStore::get(const std::string& target) const {
    const auto path = path_for(target);
    std::lock_guard guard(lock_for(target));
    std::ifstream in(path);
    if (!in) {
        return std::nullopt;
    }
    try {
        const auto doc = nlohmann::json::parse(in);
        return StoredProfile{elicitation::profile_from_json(doc.at("profile")), doc.at("version").get<std::uint64_t>()};
    } catch (const nlohmann::json::exception& e) {
        throw Error("elicitation.bad_document", fmt::format("{}: {}", path.string(), e.what()));
    }
}

StoredProfile ProfileStore::put(const elicitation::ElicitationProfile& profile,
                                std::span<const market::AreaInfo> areas) {
    auto normalized = elicitation::validate_profile(profile, areas);
    const auto path = path_for(normalized.target);

    std::lock_guard guard(lock_for(normalized.target));
    std::uint64_t version = 1;
    if (std::ifstream in(path); in) {
        try {
            version = nlohmann::json::parse(in).at("version").get<std::uint64_t>() + 1;
        } catch (const nlohmann::json::exception&) {
            // An unreadable previous document is replaced.
        }
    }
    fs::create_directories(dir_);
    const auto tmp = fs::path(path).concat(".tmp");
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) {
            throw Error("elicitation.write_failed", fmt::format("cannot write {}", tmp.string()));
        }
        nlohmann::json doc = {{"version", version}, {"profile", elicitation::to_json(normalized)}};
        out << doc.dump(2) << '\n';
    }
    fs::rename(tmp, path);
    return {std::move(normalized), version};
}

}  // namespace areacfd::service
