#include "pseudoq/diag.hpp"

#include <iostream>
#include <mutex>

namespace pseudoq {

namespace {

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

DiagnosticSink& current_sink() {
    static DiagnosticSink sink = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
    return sink;
}

}  // namespace

void set_diagnostic_sink(DiagnosticSink sink) {
    std::lock_guard lock(sink_mutex());
    current_sink() = std::move(sink);
}

void diagnostic(const std::string& message) {
    std::lock_guard lock(sink_mutex());
    if (current_sink()) current_sink()(message);
}

ScopedDiagnosticSink::ScopedDiagnosticSink(DiagnosticSink sink) {
    std::lock_guard lock(sink_mutex());
    previous_ = std::move(current_sink());
    current_sink() = std::move(sink);
}

ScopedDiagnosticSink::~ScopedDiagnosticSink() {
    std::lock_guard lock(sink_mutex());
    current_sink() = std::move(previous_);
}

}  // namespace pseudoq
