class ConstrainedMFGError(Exception):
    pass
