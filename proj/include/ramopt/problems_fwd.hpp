#pragma once

namespace ramopt {
struct ProblemInstance;
}
