// Writes a synthetic market data directory that `areacfd` can ingest.

#include "areacfd/error.hpp"
#include "areacfd/service/profile_store.hpp"
#include "areacfd/synthetic.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

int main(int argc, char** argv) {
    std::string out;
    std::uint64_t seed = 1;
    bool with_profile = false;
    CLI::App app{"Synthetic market data for areacfd", "areacfd-fixture"};
    app.add_option("--out", out, "Target directory")->required();
    app.add_option("--seed", seed, "Random seed");
    app.add_flag("--with-profile", with_profile, "Also store an example NO2 profile under <out>/profiles");
    CLI11_PARSE(app, argc, argv);

    try {
        areacfd::synthetic::FixtureOptions options;
        options.seed = seed;
        const auto fixture = areacfd::synthetic::write_fixture(out, options);
        if (with_profile) {
            areacfd::service::ProfileStore store(std::filesystem::path(out) / "profiles");
            store.put(areacfd::synthetic::example_profile("NO2"), fixture.areas);
        }
        std::cout << fmt::format("wrote fixture to {}\n", out);
    } catch (const areacfd::Error& e) {
        std::cerr << fmt::format("error: {}: {}\n", e.code(), e.what());
        return 1;
    }
    return 0;
}
