#pragma once

#include <functional>
#include <string>

namespace pseudoq {

// Non-fatal diagnostics (dropped query terms, clamped parameters, ...).
// Default sink writes to stderr; tests install a capturing sink.
using DiagnosticSink = std::function<void(const std::string&)>;

void set_diagnostic_sink(DiagnosticSink sink);
void diagnostic(const std::string& message);

/// Restores the previous sink on destruction.
class ScopedDiagnosticSink {
  public:
    explicit ScopedDiagnosticSink(DiagnosticSink sink);
    ~ScopedDiagnosticSink();
    ScopedDiagnosticSink(const ScopedDiagnosticSink&) = delete;
    ScopedDiagnosticSink& operator=(const ScopedDiagnosticSink&) = delete;

  private:
    DiagnosticSink previous_;
};

}  // namespace pseudoq
