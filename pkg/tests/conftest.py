import matplotlib

matplotlib.use("Agg", force=True)
