# import commented
import kept  # import trailing
