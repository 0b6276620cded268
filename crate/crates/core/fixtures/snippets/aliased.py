import numpy as np
import pandas as pd, scipy.stats as st
