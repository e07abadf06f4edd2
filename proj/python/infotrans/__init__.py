from ._infotrans import *  # noqa: F401,F403
