#include "ultraweyl/verify.hpp"
