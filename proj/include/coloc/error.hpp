// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coloc {

/// Base class for all library errors.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent topology/device configuration.
class config_error : public error
{
public:
    using error::error;
};

/// A target handle does not name a usable place in the system.
class invalid_target_error : public error
{
public:
    using error::error;
};

/// Memory request could not be satisfied by the target's backing store.
class allocation_error : public error
{
public:
    allocation_error(std::size_t requested_bytes, std::string place)
      : error("allocation of " + std::to_string(requested_bytes) +
            " bytes failed on " + place)
      , requested_bytes_(requested_bytes)
      , place_(std::move(place))
    {
    }

    std::size_t requested_bytes() const noexcept { return requested_bytes_; }
    std::string const& place() const noexcept { return place_; }

private:
    std::size_t requested_bytes_;
    std::string place_;
};

/// Work was submitted to an executor that is already shut down.
class submission_error : public error
{
public:
    using error::error;
};

}    // namespace coloc
