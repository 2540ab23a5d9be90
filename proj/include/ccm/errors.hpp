// Error types shared across the library. Each failure mode named by the
// module contracts gets its own exception so callers can react precisely.
#pragma once

#include <stdexcept>
#include <string>

namespace ccm {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// core
struct OutOfArena : Error { using Error::Error; };
struct BadIndex : Error { using Error::Error; };
struct InvariantViolation : Error { using Error::Error; };

// tmnn
struct LearningDiverged : Error { using Error::Error; };

// lattice
struct UnstableIntegration : Error { using Error::Error; };
struct InvalidStart : Error { using Error::Error; };

// social
struct NoVisualAxis : Error { using Error::Error; };
struct DegenerateVelocity : Error { using Error::Error; };

// planner
struct NoPath : Error { using Error::Error; };

// metrics
struct IncompleteRun : Error { using Error::Error; };
struct EmptyTrajectory : Error { using Error::Error; };

// scenarios
struct TemplateInfeasible : Error { using Error::Error; };

// io / cli
struct ConfigError : Error { using Error::Error; };

}  // namespace ccm
