// Standalone mock SVI provider + geocoder for offline runs and demos.
// Prints the bound port on stdout and serves until killed.

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

#include "svipipe/mock.hpp"

namespace {
volatile std::sig_atomic_t g_stop = 0;

void handle_signal(int) { g_stop = 1; }
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mock SVI provider server"};
    std::string api_key;
    int port = 8787;
    int latency_ms = 0;
    int fail_429_every = 0;
    int fail_500_every = 0;
    app.add_option("--port", port, "port to bind (0 = any free port)");
    app.add_option("--api-key", api_key, "require this X-Api-Key header");
    app.add_option("--latency-ms", latency_ms, "added latency per request");
    app.add_option("--fail-429-every", fail_429_every, "every Nth request answers 429");
    app.add_option("--fail-500-every", fail_500_every, "every Nth request answers 500");
    CLI11_PARSE(app, argc, argv);

    svipipe::mock::MockProviderServer server(api_key);
    server.set_faults({latency_ms, fail_429_every, fail_500_every});
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);

    const int bound = server.start(port);
    std::cout << bound << std::endl;
    std::cerr << "[info] mock-provider: serving 50-image corpus on 127.0.0.1:" << bound
              << std::endl;

    while (!g_stop) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    server.stop();
    return 0;
}
