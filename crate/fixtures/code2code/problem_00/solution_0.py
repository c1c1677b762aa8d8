def max_rating(stores):
    return max(store.rating for store in stores)
