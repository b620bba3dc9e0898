#include "alignforge/log.hpp"

#include <iostream>
#include <mutex>
#include <string>

namespace alignforge::log {

namespace {

std::mutex g_mutex;
Sink g_sink;

void emit(const char* level, std::string_view message) {
    std::lock_guard<std::mutex> lock(g_mutex);
    if (g_sink) {
        std::string line = std::string(level) + " " + std::string(message);
        g_sink(line);
    } else {
        std::cerr << level << " " << message << "\n";
    }
}

}  // namespace

void set_sink(Sink sink) {
    std::lock_guard<std::mutex> lock(g_mutex);
    g_sink = std::move(sink);
}

void info(std::string_view message) { emit("[info]", message); }
void warn(std::string_view message) { emit("[warn]", message); }

}  // namespace alignforge::log
