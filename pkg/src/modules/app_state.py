"""
Global run state for gsketch.
"""

class AppState:
    def __init__(self):
        self.debug_mode = False
        self.threads = 1
        self.chunk_size = 256  # points per reduction chunk; fixed so --threads never changes sums
        self.sequential = True

    def reset(self):
        self.__init__()

# Global state instance
state = AppState()
