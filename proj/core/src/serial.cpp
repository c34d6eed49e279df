#include "ultraweyl/serial.hpp"
