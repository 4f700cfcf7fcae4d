from fedalign.log import set_up_logger


__version__ = "0.1.0"

set_up_logger()
