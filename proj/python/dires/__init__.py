from _dires import *  # noqa: F401,F403
