/*
              __ __ __
             |__|__|  | __
             |  |  |  ||__|
  ___ ___ __ |  |  |  |
 |   |   |  ||  |  |  |    Ubiquitous Internet @ IIT-CNR
 |   |   |  ||  |  |  |    C++ edge computing libraries and tools
 |_______|__||__|__|__|    https://github.com/ccicconetti/serverlessonedge

Licensed under the MIT License <http://opensource.org/licenses/MIT>
Copyright (c) 2022 C. Cicconetti <https://ccicconetti.github.io/>

Permission is hereby  granted, free of charge, to any  person obtaining a copy
of this software and associated  documentation files (the "Software"), to deal
in the Software  without restriction, including without  limitation the rights
to  use, copy,  modify, merge,  publish, distribute,  sublicense, and/or  sell
copies  of  the Software,  and  to  permit persons  to  whom  the Software  is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in all
copies or substantial portions of the Software.

THE SOFTWARE  IS PROVIDED "AS  IS", WITHOUT WARRANTY  OF ANY KIND,  EXPRESS OR
IMPLIED,  INCLUDING BUT  NOT  LIMITED TO  THE  WARRANTIES OF  MERCHANTABILITY,
FITNESS FOR  A PARTICULAR PURPOSE AND  NONINFRINGEMENT. IN NO EVENT  SHALL THE
AUTHORS  OR COPYRIGHT  HOLDERS  BE  LIABLE FOR  ANY  CLAIM,  DAMAGES OR  OTHER
LIABILITY, WHETHER IN AN ACTION OF  CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE  OR THE USE OR OTHER DEALINGS IN THE
SOFTWARE.
*/

#pragma once

#include "qkdedge/topology.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace uiiit {
namespace qkdedge {

using RequestId = std::uint64_t;

//! An edge application request arriving online.
struct AppRequest {
  RequestId theId         = 0;
  double    theArrival    = 0; //!< simulated time, in s
  NodeId    theAttachment = 0; //!< where the user enters the QKD network
  double    theKeyRate    = 0; //!< key rate demand, in b/s
  double    theCpu        = 0; //!< processing demand
  double    theHolding    = 0; //!< lifetime, in s

  double departure() const noexcept {
    return theArrival + theHolding;
  }

  //! \throw std::invalid_argument if a field is out of range.
  void validate() const {
    const auto positive = [](const double x) {
      return std::isfinite(x) and x > 0;
    };
    if (not std::isfinite(theArrival) or theArrival < 0) {
      throw std::invalid_argument("invalid request " + std::to_string(theId) +
                                  ": negative arrival time");
    }
    if (not positive(theKeyRate) or not positive(theCpu) or
        not positive(theHolding)) {
      throw std::invalid_argument(
          "invalid request " + std::to_string(theId) +
          ": key rate, cpu, and holding time must be positive");
    }
  }

  bool operator==(const AppRequest&) const = default;

  std::string toString() const {
    std::stringstream ret;
    ret << "#" << theId << " t=" << theArrival << " node " << theAttachment
        << " key " << theKeyRate << " b/s, cpu " << theCpu << ", holding "
        << theHolding << " s";
    return ret.str();
  }
};

/**
 * Joint allocation of an admitted request: the edge node serving it and the
 * path from the attachment node, with the key rate reserved on every link of
 * the path (trusted relays) and the processing reserved on the edge node.
 */
struct Assignment {
  RequestId theRequest = 0;
  NodeId    theEdge    = 0;
  Path      thePath;
  double    theKeyRate = 0;
  double    theCpu     = 0;

  std::size_t hops() const noexcept {
    return thePath.empty() ? 0 : thePath.size() - 1;
  }

  bool operator==(const Assignment&) const = default;

  static Assignment
  make(const AppRequest& aRequest, const NodeId aEdge, Path aPath) {
    return Assignment{
        aRequest.theId, aEdge, std::move(aPath), aRequest.theKeyRate,
        aRequest.theCpu};
  }
};

inline std::string toString(const Path& aPath) {
  std::string ret;
  for (const auto myNode : aPath) {
    if (not ret.empty()) {
      ret += '-';
    }
    ret += std::to_string(myNode);
  }
  return ret;
}

} // namespace qkdedge
} // namespace uiiit
