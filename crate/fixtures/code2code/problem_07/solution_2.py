def peak(values):
    ordered = sorted(v.volume for v in values)
    return ordered[-1]
